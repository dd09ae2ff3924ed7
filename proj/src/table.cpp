#include "lpcop/table.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace lpcop {

ContingencyTable::ContingencyTable(std::vector<double> counts, std::size_t n_rows,
                                   std::size_t n_cols, std::vector<double> row_values,
                                   std::vector<double> col_values,
                                   std::vector<std::string> row_names,
                                   std::vector<std::string> col_names)
    : counts_(std::move(counts)),
      n_rows_(n_rows),
      n_cols_(n_cols),
      row_values_(std::move(row_values)),
      col_values_(std::move(col_values)),
      row_names_(std::move(row_names)),
      col_names_(std::move(col_names)) {
  if (n_rows_ == 0 || n_cols_ == 0 || counts_.size() != n_rows_ * n_cols_)
    throw std::invalid_argument("contingency table dimensions do not match counts");
  if (row_values_.size() != n_rows_ || col_values_.size() != n_cols_)
    throw std::invalid_argument("contingency table labels do not match dimensions");
  for (std::size_t i = 1; i < n_rows_; ++i)
    if (!(row_values_[i] > row_values_[i - 1]))
      throw std::invalid_argument("row values must be strictly increasing");
  for (std::size_t i = 1; i < n_cols_; ++i)
    if (!(col_values_[i] > col_values_[i - 1]))
      throw std::invalid_argument("column values must be strictly increasing");
  row_margin_.assign(n_rows_, 0.0);
  col_margin_.assign(n_cols_, 0.0);
  for (std::size_t k = 0; k < n_rows_; ++k)
    for (std::size_t l = 0; l < n_cols_; ++l) {
      const double c = counts_[k * n_cols_ + l];
      if (!(c >= 0.0) || std::floor(c) != c)
        throw std::invalid_argument("cell counts must be nonnegative integers");
      row_margin_[k] += c;
      col_margin_[l] += c;
      n_ += c;
    }
  if (!(n_ > 0.0)) throw std::invalid_argument("contingency table has no observations");
}

ContingencyTable ContingencyTable::from_pairs(std::span<const double> xs,
                                              std::span<const double> ys) {
  if (xs.empty() || xs.size() != ys.size())
    throw std::invalid_argument("paired observations required");
  std::vector<double> xv(xs.begin(), xs.end()), yv(ys.begin(), ys.end());
  std::sort(xv.begin(), xv.end());
  xv.erase(std::unique(xv.begin(), xv.end()), xv.end());
  std::sort(yv.begin(), yv.end());
  yv.erase(std::unique(yv.begin(), yv.end()), yv.end());
  std::vector<double> counts(xv.size() * yv.size(), 0.0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto k = static_cast<std::size_t>(
        std::lower_bound(xv.begin(), xv.end(), xs[i]) - xv.begin());
    const auto l = static_cast<std::size_t>(
        std::lower_bound(yv.begin(), yv.end(), ys[i]) - yv.begin());
    counts[k * yv.size() + l] += 1.0;
  }
  return ContingencyTable(std::move(counts), xv.size(), yv.size(), xv, yv);
}

Marginal ContingencyTable::row_marginal() const {
  return Marginal::from_counts(row_values_, row_margin_);
}

Marginal ContingencyTable::col_marginal() const {
  return Marginal::from_counts(col_values_, col_margin_);
}

bool ContingencyTable::strictly_positive() const {
  for (double c : counts_)
    if (c == 0.0) return false;
  return true;
}

void ContingencyTable::expand_pairs(std::vector<double>& xs,
                                    std::vector<double>& ys) const {
  xs.clear();
  ys.clear();
  xs.reserve(static_cast<std::size_t>(n_));
  ys.reserve(static_cast<std::size_t>(n_));
  for (std::size_t k = 0; k < n_rows_; ++k)
    for (std::size_t l = 0; l < n_cols_; ++l) {
      const auto c = static_cast<std::size_t>(counts_[k * n_cols_ + l]);
      for (std::size_t r = 0; r < c; ++r) {
        xs.push_back(row_values_[k]);
        ys.push_back(col_values_[l]);
      }
    }
}

}  // namespace lpcop
