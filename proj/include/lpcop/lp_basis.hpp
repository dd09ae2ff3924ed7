#pragma once

#include <span>
#include <vector>

#include "lpcop/marginal.hpp"

namespace lpcop {

// Orthonormal LP-polynomial system {T_1..T_m} for a marginal, stored as an
// evaluation table over the support atoms. T_1 is the standardized
// mid-distribution transform; higher orders come from modified Gram-Schmidt
// of its powers. In the unit domain the same table read through the quantile
// function gives the S_j functions, piecewise constant on probability cells.
class LpBasis {
public:
  LpBasis() = default;  // empty placeholder; assign before use

  static LpBasis build(const Marginal& m, int degree);

  int degree() const { return degree_; }
  const Marginal& marginal() const { return marginal_; }
  std::size_t support_size() const { return marginal_.size(); }

  // T_j at atom k; j is 1-based to match the usual ordering T_1, T_2, ...
  double at(int j, std::size_t k) const {
    return table_[static_cast<std::size_t>(j - 1) * marginal_.size() + k];
  }
  std::span<const double> row(int j) const {
    return {table_.data() + static_cast<std::size_t>(j - 1) * marginal_.size(),
            marginal_.size()};
  }

  // S_j(u) = T_j(Q(u)) for u in (0,1).
  double eval_u(int j, double u) const;

  // T_j at a support value x; throws off support.
  double eval_x(int j, double x) const;

private:
  Marginal marginal_;
  int degree_ = 0;
  std::vector<double> table_;  // degree x K, row-major
};

// min(K-1, cap); cap defaults to the highest order used in practice.
int max_degree_default(const Marginal& m, int cap = 4);

}  // namespace lpcop
