#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "lpcop/lp_basis.hpp"
#include "lpcop/table.hpp"

namespace lpcop {

// LP-comean table: entry (j,k) is the empirical cross-moment
// (1/n) sum_i T_j(x_i) T_k(y_i), the sufficient statistic of the model.
struct CoMomentTable {
  int m1 = 0, m2 = 0;
  std::size_t n = 0;
  std::vector<double> values;  // row-major m1 x m2
  double at(int j, int k) const {
    return values[static_cast<std::size_t>(j - 1) * m2 + (k - 1)];
  }
};

CoMomentTable comoments(const LpBasis& bx, const LpBasis& by,
                        std::span<const double> xs, std::span<const double> ys);

// Count-weighted version over a contingency table whose row/column values
// map onto the bases' supports.
CoMomentTable comoments(const LpBasis& bx, const LpBasis& by,
                        const ContingencyTable& table);

// Constraint set chosen by the penalized ordered sum of squares:
// PenSum(q) = (sum of the top-q squared comeans) - (gamma/n) q.
struct SelectionResult {
  std::vector<std::pair<int, int>> chosen;  // (j,k), 1-based, strongest first
  std::vector<double> pensum_trace;         // PenSum(1..m1*m2)
  double gamma = 2.0;
};

// gamma = 2 for AIC, log(n) for BIC. An empty selection (all PenSum <= 0)
// is the independence model, not an error.
SelectionResult select(const CoMomentTable& t, double gamma);

// Keeps every candidate index (the dense, saturated model), ordered the same
// way as select().
SelectionResult select_all(const CoMomentTable& t);

}  // namespace lpcop
