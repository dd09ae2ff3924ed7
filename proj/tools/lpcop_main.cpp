#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <optional>
#include <string>

#include "lpcop/grid_kernels.hpp"
#include "lpcop/inference.hpp"
#include "lpcop/loglinear.hpp"
#include "lpcop/logistic.hpp"
#include "lpcop/model_io.hpp"
#include "lpcop/pipeline.hpp"

namespace fs = std::filesystem;
using lpcop::io::format_double;
using ordered_json = nlohmann::ordered_json;

namespace {

struct CommonArgs {
  std::string data;
  std::string format = "pairs";
  std::string marginals = "empirical";
  std::string penalty = "aic";
  std::string selection = "pensum";
  int max_order = 4;
  double tol = 1e-8;
  std::uint64_t seed = 0;
  std::string out = ".";
};

void add_fit_flags(CLI::App* cmd, CommonArgs& a, bool needs_data = true) {
  auto* d = cmd->add_option("--data", a.data, "input CSV file");
  if (needs_data) d->required();
  cmd->add_option("--format", a.format, "input layout: pairs|table")
      ->check(CLI::IsMember({"pairs", "table"}));
  cmd->add_option("--marginals", a.marginals, "marginal model: empirical|negbin")
      ->check(CLI::IsMember({"empirical", "negbin"}));
  cmd->add_option("--penalty", a.penalty, "PenSum penalty: aic|bic")
      ->check(CLI::IsMember({"aic", "bic"}));
  cmd->add_option("--select", a.selection, "constraint selection: pensum|dense")
      ->check(CLI::IsMember({"pensum", "dense"}));
  cmd->add_option("--max-order", a.max_order, "LP basis order cap")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tol", a.tol, "fit gradient tolerance");
  cmd->add_option("--seed", a.seed, "RNG seed");
  cmd->add_option("--out", a.out, "output directory");
}

lpcop::FitConfig to_config(const CommonArgs& a) {
  lpcop::FitConfig cfg;
  cfg.penalty = a.penalty == "bic" ? lpcop::PenaltyRule::bic : lpcop::PenaltyRule::aic;
  cfg.dense = a.selection == "dense";
  cfg.max_order = a.max_order;
  cfg.marginals = a.marginals == "negbin" ? lpcop::MarginalsMode::negbin
                                          : lpcop::MarginalsMode::empirical;
  cfg.fit.tol = a.tol;
  return cfg;
}

std::string config_string(const CommonArgs& a) {
  return "format=" + a.format + " marginals=" + a.marginals + " penalty=" + a.penalty +
         " select=" + a.selection + " max-order=" + std::to_string(a.max_order);
}

struct LoadedData {
  std::optional<lpcop::ContingencyTable> table;
  std::vector<double> xs, ys;
  std::string x_name = "X", y_name = "Y";
};

LoadedData load_data(const CommonArgs& a) {
  LoadedData d;
  if (a.format == "table") {
    d.table = lpcop::io::read_table_csv(a.data);
    d.table->expand_pairs(d.xs, d.ys);
  } else {
    auto pc = lpcop::io::read_pairs_csv(a.data);
    d.xs = std::move(pc.xs);
    d.ys = std::move(pc.ys);
    d.x_name = pc.x_name;
    d.y_name = pc.y_name;
  }
  return d;
}

// table view of either input format (pairs are cross-tabulated)
lpcop::ContingencyTable load_table(const CommonArgs& a) {
  if (a.format == "table") return lpcop::io::read_table_csv(a.data);
  const auto pc = lpcop::io::read_pairs_csv(a.data);
  return lpcop::ContingencyTable::from_pairs(pc.xs, pc.ys);
}

lpcop::FittedCopula run_fit(const CommonArgs& a, const LoadedData& d) {
  const auto cfg = to_config(a);
  if (d.table) return lpcop::fit_table(*d.table, cfg);
  return lpcop::fit_pairs(d.xs, d.ys, cfg);
}

fs::path out_path(const CommonArgs& a, const std::string& name) {
  fs::create_directories(a.out);
  return fs::path(a.out) / name;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

int cmd_fit(const CommonArgs& a) {
  const auto data = load_data(a);
  const auto fitted = run_fit(a, data);
  lpcop::io::Provenance prov{lpcop::io::hash_file(a.data), config_string(a), a.seed};
  const auto model_file = out_path(a, "model.json");
  lpcop::io::save_model(fitted.model, prov, model_file);

  std::cout << lpcop::io::equation_string(fitted.model) << "\n";
  std::cout << "selected " << fitted.selection.chosen.size() << " of "
            << fitted.comeans.values.size() << " candidate comeans (n=" << fitted.comeans.n
            << ")\n";
  const auto& rep = fitted.model.report();
  std::cout << "fit: " << rep.iterations << " iterations, gradient max-norm "
            << format_double(rep.grad_norm)
            << (rep.gradient_fallback ? ", gradient fallback" : "") << "\n";
  std::cout << "model written to " << model_file.string() << "\n";
  return 0;
}

ordered_json report_to_json(const lpcop::TestReport& r) {
  ordered_json j;
  switch (r.method) {
    case lpcop::TestMethod::g2: j["method"] = "g2"; break;
    case lpcop::TestMethod::smooth_g2: j["method"] = "smooth-g2"; break;
    case lpcop::TestMethod::mi_permutation: j["method"] = "mi-perm"; break;
  }
  j["statistic"] = r.statistic;
  j["df"] = r.df;
  j["p_value"] = r.p_value;
  j["n"] = r.n;
  return j;
}

int cmd_test(const CommonArgs& a, const std::string& method, int perms) {
  const auto data = load_data(a);
  lpcop::TestReport r;
  if (method == "g2") {
    r = lpcop::g2_test(data.table ? *data.table
                                  : lpcop::ContingencyTable::from_pairs(data.xs, data.ys));
  } else if (method == "smooth-g2") {
    r = lpcop::smooth_g2_test(
        data.table ? *data.table : lpcop::ContingencyTable::from_pairs(data.xs, data.ys),
        to_config(a));
  } else {
    r = lpcop::mi_permutation_test(data.xs, data.ys, to_config(a), perms, a.seed);
  }
  const auto j = report_to_json(r);
  write_text(out_path(a, "report.json"), j.dump(2) + "\n");
  std::cout << j["method"].get<std::string>() << ": statistic "
            << format_double(r.statistic) << ", df " << r.df << ", p-value "
            << format_double(r.p_value) << " (n=" << r.n << ")\n";
  return 0;
}

int cmd_smooth(const CommonArgs& a) {
  const auto table = load_table(a);
  const auto fitted = lpcop::fit_table(table, to_config(a));
  const auto cells = fitted.model.smooth_cells(table);
  auto labels = [](const std::vector<std::string>& names,
                   const std::vector<double>& values) {
    if (!names.empty()) return names;
    std::vector<std::string> out;
    for (double v : values) out.push_back(lpcop::io::format_double(v));
    return out;
  };
  const auto path = out_path(a, "smoothed.csv");
  lpcop::io::write_matrix_csv(path, labels(table.row_names(), table.row_values()),
                              labels(table.col_names(), table.col_values()), cells,
                              "cell");
  std::cout << lpcop::io::equation_string(fitted.model) << "\n";
  std::cout << "smoothed table written to " << path.string() << "\n";
  return 0;
}

int cmd_biplot(const CommonArgs& a) {
  const auto table = load_table(a);
  const auto model = lpcop::loglinear_analysis(table, to_config(a));
  const auto pts = lpcop::biplot_coordinates(model);
  auto label = [](const std::vector<std::string>& names,
                  const std::vector<double>& values, std::size_t i) {
    return i < names.size() ? names[i] : lpcop::io::format_double(values[i]);
  };
  std::string csv = "type,name,axis1,axis2\n";
  for (std::size_t k = 0; k < pts.row_points.size(); ++k)
    csv += "row," + label(table.row_names(), table.row_values(), k) + "," +
           format_double(pts.row_points[k][0]) + "," +
           format_double(pts.row_points[k][1]) + "\n";
  for (std::size_t l = 0; l < pts.col_points.size(); ++l)
    csv += "col," + label(table.col_names(), table.col_values(), l) + "," +
           format_double(pts.col_points[l][0]) + "," +
           format_double(pts.col_points[l][1]) + "\n";
  const auto path = out_path(a, "biplot.csv");
  write_text(path, csv);
  std::cout << "components:";
  for (double m : model.mu) std::cout << ' ' << format_double(m);
  std::cout << "\nconstant: " << format_double(model.mu0) << "\n";
  std::cout << "biplot written to " << path.string() << "\n";
  return 0;
}

// Exact average of the piecewise-constant copula over an R x R uniform grid;
// the weighted sum of the emitted values is the full integral.
int cmd_grid(const CommonArgs& a, const std::string& model_path, int resolution) {
  std::optional<lpcop::MaxEntCopulaModel> model;
  if (!model_path.empty()) {
    model = lpcop::io::load_model(model_path);
  } else {
    const auto data = load_data(a);
    model = run_fit(a, data).model;
  }

  const auto overlap = [](const lpcop::Marginal& m, int R) {
    // weights[r] = (cell index, measure of that cell inside [r/R, (r+1)/R])
    std::vector<std::vector<std::pair<std::size_t, double>>> w(R);
    for (int r = 0; r < R; ++r) {
      const double lo = static_cast<double>(r) / R, hi = static_cast<double>(r + 1) / R;
      double prev = 0.0;
      for (std::size_t k = 0; k < m.size(); ++k) {
        const double ck = m.cdf_at(k);
        const double ov = std::min(hi, ck) - std::max(lo, prev);
        if (ov > 0.0) w[r].push_back({k, ov});
        prev = ck;
        if (prev >= hi) break;
      }
    }
    return w;
  };
  const auto wx = overlap(model->basis_x().marginal(), resolution);
  const auto wy = overlap(model->basis_y().marginal(), resolution);

  std::string csv = "u_lo,u_hi,v_lo,v_hi,density\n";
  for (int r = 0; r < resolution; ++r)
    for (int c = 0; c < resolution; ++c) {
      double acc = 0.0;
      for (const auto& [k, wk] : wx[r])
        for (const auto& [l, wl] : wy[c]) acc += wk * wl * model->density_cell(k, l);
      const double area = 1.0 / (static_cast<double>(resolution) * resolution);
      csv += format_double(static_cast<double>(r) / resolution) + "," +
             format_double(static_cast<double>(r + 1) / resolution) + "," +
             format_double(static_cast<double>(c) / resolution) + "," +
             format_double(static_cast<double>(c + 1) / resolution) + "," +
             format_double(acc / area) + "\n";
    }
  const auto path = out_path(a, "grid.csv");
  write_text(path, csv);
  std::cout << "grid written to " << path.string() << "\n";
  return 0;
}

int cmd_features(const CommonArgs& a, const std::string& coeffs_path) {
  const auto cols = lpcop::io::read_columns_csv(a.data);
  const auto fm = lpcop::feature_matrix(cols.columns, cols.names, a.max_order);
  for (const auto& s : fm.skipped)
    std::cerr << "warning: constant column skipped: " << s << "\n";
  const auto csv_path = out_path(a, "features.csv");
  lpcop::io::write_feature_csv(csv_path, fm);
  write_text(out_path(a, "features_schema.json"), lpcop::io::feature_schema_json(fm));
  std::cout << fm.column_names.size() << " feature columns for " << fm.n_rows
            << " rows written to " << csv_path.string() << "\n";

  if (!coeffs_path.empty()) {
    // external solver coefficients, one "var:order,value" row per feature;
    // LS-plot points per variable are (alpha_1, alpha_2) scaled by the max
    // absolute value per axis
    const auto cf = lpcop::io::read_name_value_csv(coeffs_path);
    std::map<std::string, std::array<double, 2>> ls;
    for (const auto& vb : fm.schema) ls[vb.name] = {0.0, 0.0};
    for (const auto& [name, value] : cf) {
      const auto pos = name.rfind(':');
      if (pos == std::string::npos) continue;
      const std::string var = name.substr(0, pos);
      const int order = std::atoi(name.c_str() + pos + 1);
      if (ls.count(var) && (order == 1 || order == 2))
        ls[var][static_cast<std::size_t>(order - 1)] = value;
    }
    double mx1 = 0.0, mx2 = 0.0;
    for (const auto& [_, v] : ls) {
      mx1 = std::max(mx1, std::abs(v[0]));
      mx2 = std::max(mx2, std::abs(v[1]));
    }
    std::string csv = "variable,location,scale\n";
    for (const auto& [name, v] : ls)
      csv += name + "," + format_double(mx1 > 0 ? v[0] / mx1 : 0.0) + "," +
             format_double(mx2 > 0 ? v[1] / mx2 : 0.0) + "\n";
    const auto ls_path = out_path(a, "ls_plot.csv");
    write_text(ls_path, csv);
    std::cout << "LS-plot coordinates written to " << ls_path.string() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* env = std::getenv("LPCOP_THREADS"))
    lpcop::kernels::set_max_threads(std::atoi(env));

  CLI::App app{"MaxEnt LP-copula models for mixed bivariate data"};
  app.require_subcommand(1);

  CommonArgs fit_args, test_args, smooth_args, biplot_args, grid_args, feat_args;
  std::string method = "g2";
  int perms = 999;
  std::string model_path;
  int resolution = 64;
  std::string coeffs_path;

  auto* fit = app.add_subcommand("fit", "fit the MaxEnt copula and write model.json");
  add_fit_flags(fit, fit_args);

  auto* test = app.add_subcommand("test", "independence tests on the fitted model");
  add_fit_flags(test, test_args);
  test->add_option("--method", method, "g2|smooth-g2|mi-perm")
      ->check(CLI::IsMember({"g2", "smooth-g2", "mi-perm"}));
  test->add_option("--perms", perms, "permutation replicates");

  auto* smooth = app.add_subcommand("smooth", "emit the copula-smoothed cell table");
  add_fit_flags(smooth, smooth_args);

  auto* biplot = app.add_subcommand("biplot", "emit logratio biplot coordinates");
  add_fit_flags(biplot, biplot_args);

  auto* grid = app.add_subcommand("grid", "emit a u-v heatmap of the copula density");
  add_fit_flags(grid, grid_args, /*needs_data=*/false);
  grid->add_option("--model", model_path, "previously saved model.json");
  grid->add_option("--resolution", resolution, "cells per axis")->check(CLI::PositiveNumber);

  auto* feat = app.add_subcommand("features", "export the stacked LP feature matrix");
  add_fit_flags(feat, feat_args);
  feat->add_option("--coeffs", coeffs_path, "external solver coefficients for the LS-plot");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (fit->parsed()) return cmd_fit(fit_args);
    if (test->parsed()) return cmd_test(test_args, method, perms);
    if (smooth->parsed()) return cmd_smooth(smooth_args);
    if (biplot->parsed()) return cmd_biplot(biplot_args);
    if (grid->parsed()) {
      if (model_path.empty() && grid_args.data.empty())
        throw std::invalid_argument("grid needs --model or --data");
      return cmd_grid(grid_args, model_path, resolution);
    }
    if (feat->parsed()) return cmd_features(feat_args, coeffs_path);
  } catch (const lpcop::FitNonConvergence& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
