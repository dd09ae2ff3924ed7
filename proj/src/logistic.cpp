#include "lpcop/logistic.hpp"

#include <cmath>
#include <stdexcept>

namespace lpcop {

double CopulaLogisticModel::linear_predictor(double x) const {
  const std::size_t k = basis.marginal().nearest_index(x);
  double lp = alpha0;
  for (std::size_t j = 0; j < alphas.size(); ++j)
    lp += alphas[j] * basis.at(static_cast<int>(j) + 1, k);
  return lp;
}

double CopulaLogisticModel::predict_proba(double x) const {
  return 1.0 / (1.0 + std::exp(-linear_predictor(x)));
}

CopulaLogisticModel copula_logistic(const MaxEntCopulaModel& m, BinarySide binary_side) {
  const bool y_binary = (binary_side == BinarySide::y);
  const LpBasis& bin = y_binary ? m.basis_y() : m.basis_x();
  const LpBasis& pred = y_binary ? m.basis_x() : m.basis_y();
  if (bin.marginal().size() != 2 || bin.degree() != 1)
    throw std::invalid_argument("designated side is not binary");

  CopulaLogisticModel out;
  out.basis = pred;
  out.mu = bin.marginal().probs()[1];  // mass of the upper atom
  out.alpha0 = std::log(out.mu / (1.0 - out.mu));
  out.alphas.assign(static_cast<std::size_t>(pred.degree()), 0.0);
  const double scale = 1.0 / std::sqrt(out.mu * (1.0 - out.mu));
  for (std::size_t t = 0; t < m.theta().size(); ++t) {
    const int j = y_binary ? m.indices()[t].first : m.indices()[t].second;
    out.alphas[static_cast<std::size_t>(j - 1)] += m.theta()[t] * scale;
  }
  return out;
}

FeatureMatrix feature_matrix(const std::vector<std::vector<double>>& columns,
                             const std::vector<std::string>& names, int max_order) {
  if (max_order < 1) throw std::invalid_argument("max_order must be >= 1");
  if (columns.size() != names.size())
    throw std::invalid_argument("column names must align with columns");
  if (columns.empty()) throw std::invalid_argument("no predictor columns");
  const std::size_t n = columns[0].size();
  if (n == 0) throw std::invalid_argument("empty sample");

  FeatureMatrix fm;
  fm.n_rows = n;
  struct Built {
    LpBasis basis;
    std::vector<std::size_t> idx;  // atom index per observation
    std::size_t var;
  };
  std::vector<Built> built;
  for (std::size_t v = 0; v < columns.size(); ++v) {
    if (columns[v].size() != n)
      throw std::invalid_argument("predictor columns must have equal length");
    const Marginal m = Marginal::from_samples(columns[v]);
    if (m.size() < 2) {
      fm.skipped.push_back(names[v]);
      continue;
    }
    const int orders = max_degree_default(m, max_order);
    LpBasis b = LpBasis::build(m, orders);
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = m.index_of(columns[v][i]);
    for (int j = 1; j <= orders; ++j)
      fm.column_names.push_back(names[v] + ":" + std::to_string(j));
    FeatureMatrix::VariableBasis vb;
    vb.name = names[v];
    vb.orders = orders;
    vb.atoms = m.atoms();
    vb.table.assign(static_cast<std::size_t>(orders) * m.size(), 0.0);
    for (int j = 1; j <= orders; ++j)
      for (std::size_t k = 0; k < m.size(); ++k)
        vb.table[static_cast<std::size_t>(j - 1) * m.size() + k] = b.at(j, k);
    fm.schema.push_back(std::move(vb));
    built.push_back({std::move(b), std::move(idx), v});
  }
  if (fm.column_names.empty())
    throw std::invalid_argument("all predictor columns are constant");

  const std::size_t ncols = fm.column_names.size();
  fm.values.assign(n * ncols, 0.0);
  std::size_t col = 0;
  for (const auto& b : built) {
    for (int j = 1; j <= b.basis.degree(); ++j, ++col)
      for (std::size_t i = 0; i < n; ++i)
        fm.values[i * ncols + col] = b.basis.at(j, b.idx[i]);
  }
  return fm;
}

}  // namespace lpcop
