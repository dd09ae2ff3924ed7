#pragma once

#include <span>
#include <string>
#include <vector>

#include "lpcop/marginal.hpp"

namespace lpcop {

// I x J contingency table of nonnegative integer cell counts. Rows index the
// X variable, columns the Y variable. Row/column atom values are the numeric
// support (ordinals 1..I, 1..J when the source labels are not numeric).
class ContingencyTable {
public:
  ContingencyTable(std::vector<double> counts, std::size_t n_rows, std::size_t n_cols,
                   std::vector<double> row_values, std::vector<double> col_values,
                   std::vector<std::string> row_names = {},
                   std::vector<std::string> col_names = {});

  // Cross-tabulation of raw observation pairs over their distinct values.
  static ContingencyTable from_pairs(std::span<const double> xs,
                                     std::span<const double> ys);

  std::size_t rows() const { return n_rows_; }
  std::size_t cols() const { return n_cols_; }
  double count(std::size_t k, std::size_t l) const { return counts_[k * n_cols_ + l]; }
  const std::vector<double>& counts() const { return counts_; }
  double n() const { return n_; }
  double row_margin(std::size_t k) const { return row_margin_[k]; }
  double col_margin(std::size_t l) const { return col_margin_[l]; }

  const std::vector<double>& row_values() const { return row_values_; }
  const std::vector<double>& col_values() const { return col_values_; }
  const std::vector<std::string>& row_names() const { return row_names_; }
  const std::vector<std::string>& col_names() const { return col_names_; }

  Marginal row_marginal() const;
  Marginal col_marginal() const;
  bool strictly_positive() const;

  // Replicates each cell's atom pair count-many times (permutation tests).
  void expand_pairs(std::vector<double>& xs, std::vector<double>& ys) const;

private:
  std::vector<double> counts_;
  std::size_t n_rows_ = 0, n_cols_ = 0;
  std::vector<double> row_values_, col_values_;
  std::vector<std::string> row_names_, col_names_;
  std::vector<double> row_margin_, col_margin_;
  double n_ = 0.0;
};

}  // namespace lpcop
