#include "lpcop/model_io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace lpcop::io {

using ordered_json = nlohmann::ordered_json;

ParseError::ParseError(const std::string& file, std::size_t line,
                       const std::string& what)
    : std::runtime_error(file + ":" + std::to_string(line) + ": " + what) {}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    std::size_t a = 0, b = cell.size();
    while (a < b && std::isspace(static_cast<unsigned char>(cell[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(cell[b - 1]))) --b;
    out.push_back(cell.substr(a, b - a));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

bool blank(const std::string& s) {
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace

PairColumns read_pairs_csv(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw ParseError(path.string(), 1, "empty file");
  const auto header = split_csv_line(lines[0]);
  if (header.size() != 2)
    throw ParseError(path.string(), 1, "expected two columns in pairs format");
  PairColumns pc;
  pc.x_name = header[0];
  pc.y_name = header[1];
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (blank(lines[i])) continue;
    const auto cells = split_csv_line(lines[i]);
    double x = 0.0, y = 0.0;
    if (cells.size() != 2 || !parse_number(cells[0], x) || !parse_number(cells[1], y))
      throw ParseError(path.string(), i + 1, "expected two numeric cells");
    pc.xs.push_back(x);
    pc.ys.push_back(y);
  }
  if (pc.xs.empty()) throw ParseError(path.string(), 1, "no observations");
  return pc;
}

ContingencyTable read_table_csv(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.size() < 2) throw ParseError(path.string(), 1, "table needs header and rows");
  const auto header = split_csv_line(lines[0]);
  if (header.size() < 2)
    throw ParseError(path.string(), 1, "table needs at least one column label");
  std::vector<std::string> col_names(header.begin() + 1, header.end());
  std::vector<std::string> row_names;
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (blank(lines[i])) continue;
    const auto cells = split_csv_line(lines[i]);
    if (cells.size() != header.size())
      throw ParseError(path.string(), i + 1, "row width does not match header");
    row_names.push_back(cells[0]);
    std::vector<double> row(cells.size() - 1, 0.0);
    for (std::size_t c = 1; c < cells.size(); ++c) {
      if (!parse_number(cells[c], row[c - 1]))
        throw ParseError(path.string(), i + 1, "expected a numeric cell count");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(path.string(), 2, "no table rows");

  auto label_values = [](const std::vector<std::string>& labels) {
    std::vector<double> vals(labels.size(), 0.0);
    bool numeric = true;
    for (std::size_t i = 0; i < labels.size() && numeric; ++i)
      numeric = parse_number(labels[i], vals[i]);
    if (numeric) {
      for (std::size_t i = 1; i < vals.size() && numeric; ++i)
        numeric = vals[i] > vals[i - 1];
    }
    if (!numeric)
      for (std::size_t i = 0; i < vals.size(); ++i)
        vals[i] = static_cast<double>(i + 1);  // ordinal coding
    return vals;
  };

  const std::size_t nr = rows.size(), nc = col_names.size();
  std::vector<double> counts(nr * nc, 0.0);
  for (std::size_t k = 0; k < nr; ++k)
    for (std::size_t l = 0; l < nc; ++l) counts[k * nc + l] = rows[k][l];
  std::vector<double> row_values = label_values(row_names);
  std::vector<double> col_values = label_values(col_names);
  return ContingencyTable(std::move(counts), nr, nc, std::move(row_values),
                          std::move(col_values), std::move(row_names),
                          std::move(col_names));
}

NamedColumns read_columns_csv(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.size() < 2)
    throw ParseError(path.string(), 1, "expected a header and data rows");
  NamedColumns nc;
  nc.names = split_csv_line(lines[0]);
  nc.columns.resize(nc.names.size());
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (blank(lines[i])) continue;
    const auto cells = split_csv_line(lines[i]);
    if (cells.size() != nc.names.size())
      throw ParseError(path.string(), i + 1, "row width does not match header");
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = 0.0;
      if (!parse_number(cells[c], v))
        throw ParseError(path.string(), i + 1, "expected a numeric cell");
      nc.columns[c].push_back(v);
    }
  }
  return nc;
}

std::vector<std::pair<std::string, double>> read_name_value_csv(
    const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (blank(lines[i])) continue;
    const auto cells = split_csv_line(lines[i]);
    if (cells.size() != 2)
      throw ParseError(path.string(), i + 1, "expected name,value rows");
    double v = 0.0;
    if (!parse_number(cells[1], v)) {
      if (i == 0) continue;  // header row
      throw ParseError(path.string(), i + 1, "expected a numeric value");
    }
    out.emplace_back(cells[0], v);
  }
  if (out.empty()) throw ParseError(path.string(), 1, "no coefficient rows");
  return out;
}

namespace {

ordered_json marginal_to_json(const Marginal& m) {
  ordered_json j;
  switch (m.kind()) {
    case MarginalKind::empirical: j["kind"] = "empirical"; break;
    case MarginalKind::tabulated: j["kind"] = "tabulated"; break;
    case MarginalKind::parametric: j["kind"] = "parametric"; break;
  }
  if (m.kind() == MarginalKind::parametric) {
    j["name"] = m.param_name();
    j["params"] = m.params();
  }
  j["atoms"] = m.atoms();
  j["probs"] = m.probs();
  return j;
}

Marginal marginal_from_json(const ordered_json& j) {
  MarginalKind kind = MarginalKind::empirical;
  const std::string k = j.at("kind").get<std::string>();
  if (k == "tabulated")
    kind = MarginalKind::tabulated;
  else if (k == "parametric")
    kind = MarginalKind::parametric;
  else if (k != "empirical")
    throw std::invalid_argument("unknown marginal kind: " + k);
  std::string name;
  std::vector<double> params;
  if (kind == MarginalKind::parametric) {
    name = j.at("name").get<std::string>();
    params = j.at("params").get<std::vector<double>>();
  }
  return Marginal::from_probs(j.at("atoms").get<std::vector<double>>(),
                              j.at("probs").get<std::vector<double>>(), kind,
                              std::move(name), std::move(params));
}

}  // namespace

std::string model_to_json(const MaxEntCopulaModel& m, const Provenance& prov) {
  ordered_json j;
  j["format"] = "lpcop-model/1";
  j["marginal_x"] = marginal_to_json(m.basis_x().marginal());
  j["marginal_y"] = marginal_to_json(m.basis_y().marginal());
  j["degree_x"] = m.basis_x().degree();
  j["degree_y"] = m.basis_y().degree();
  ordered_json idx = ordered_json::array();
  for (const auto& [a, b] : m.indices()) idx.push_back({a, b});
  j["indices"] = std::move(idx);
  j["theta"] = m.theta();
  j["log_z"] = m.log_z();
  j["provenance"] = {{"input_hash", prov.input_hash},
                     {"config", prov.config},
                     {"seed", prov.seed}};
  return j.dump(2) + "\n";
}

MaxEntCopulaModel model_from_json(const std::string& text) {
  const auto j = ordered_json::parse(text);
  if (j.at("format").get<std::string>() != "lpcop-model/1")
    throw std::invalid_argument("unsupported model format");
  const Marginal mx = marginal_from_json(j.at("marginal_x"));
  const Marginal my = marginal_from_json(j.at("marginal_y"));
  auto bx = LpBasis::build(mx, j.at("degree_x").get<int>());
  auto by = LpBasis::build(my, j.at("degree_y").get<int>());
  std::vector<std::pair<int, int>> indices;
  for (const auto& e : j.at("indices"))
    indices.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  return MaxEntCopulaModel::from_stored(std::move(bx), std::move(by),
                                        std::move(indices),
                                        j.at("theta").get<std::vector<double>>(),
                                        j.at("log_z").get<double>());
}

void save_model(const MaxEntCopulaModel& m, const Provenance& prov,
                const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << model_to_json(m, prov);
}

MaxEntCopulaModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return model_from_json(ss.str());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string(), 0, e.what());
  }
}

std::string hash_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[4096];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char hex[19];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a:") + hex;
}

std::string format_double(double v) {
  // shortest representation that parses back to the same double
  for (int prec = 1; prec <= 17; ++prec) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) return buf;
  }
  return "0";
}

std::string equation_string(const MaxEntCopulaModel& m) {
  std::ostringstream os;
  os << "cop(u,v) = exp{ ";
  if (m.theta().empty()) {
    os << "0 }";
    return os.str();
  }
  char buf[64];
  for (std::size_t t = 0; t < m.theta().size(); ++t) {
    const double c = m.theta()[t];
    if (t == 0) {
      std::snprintf(buf, sizeof buf, "%.4g", c);
      os << buf;
    } else {
      std::snprintf(buf, sizeof buf, "%.4g", std::abs(c));
      os << (c < 0 ? " - " : " + ") << buf;
    }
    os << "*S" << m.indices()[t].first << "(u;X)*S" << m.indices()[t].second
       << "(v;Y)";
  }
  std::snprintf(buf, sizeof buf, "%.4g", std::abs(m.log_z()));
  os << (m.log_z() >= 0 ? " - " : " + ") << buf << " }";
  return os.str();
}

void write_matrix_csv(const std::filesystem::path& path,
                      const std::vector<std::string>& row_labels,
                      const std::vector<std::string>& col_labels,
                      const std::vector<double>& values, const std::string& corner) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << corner;
  for (const auto& c : col_labels) out << ',' << c;
  out << '\n';
  for (std::size_t r = 0; r < row_labels.size(); ++r) {
    out << row_labels[r];
    for (std::size_t c = 0; c < col_labels.size(); ++c)
      out << ',' << format_double(values[r * col_labels.size() + c]);
    out << '\n';
  }
}

void write_feature_csv(const std::filesystem::path& path, const FeatureMatrix& fm) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (std::size_t c = 0; c < fm.column_names.size(); ++c)
    out << (c ? "," : "") << fm.column_names[c];
  out << '\n';
  for (std::size_t r = 0; r < fm.n_rows; ++r) {
    for (std::size_t c = 0; c < fm.column_names.size(); ++c)
      out << (c ? "," : "") << format_double(fm.at(r, c));
    out << '\n';
  }
}

std::string feature_schema_json(const FeatureMatrix& fm) {
  ordered_json j;
  j["format"] = "lpcop-features/1";
  j["n_rows"] = fm.n_rows;
  j["columns"] = fm.column_names;
  ordered_json vars = ordered_json::array();
  for (const auto& vb : fm.schema) {
    ordered_json v;
    v["name"] = vb.name;
    v["orders"] = vb.orders;
    v["atoms"] = vb.atoms;
    v["basis_table"] = vb.table;
    vars.push_back(std::move(v));
  }
  j["variables"] = std::move(vars);
  j["skipped_constant"] = fm.skipped;
  return j.dump(2) + "\n";
}

}  // namespace lpcop::io
