#pragma once

#include <span>

#include "lpcop/comoments.hpp"
#include "lpcop/maxent.hpp"
#include "lpcop/table.hpp"

namespace lpcop {

enum class PenaltyRule { aic, bic };
enum class MarginalsMode { empirical, negbin };

struct FitConfig {
  PenaltyRule penalty = PenaltyRule::aic;
  bool dense = false;  // keep every candidate index instead of PenSum pruning
  int max_order = 4;
  MarginalsMode marginals = MarginalsMode::empirical;
  double truncation_eps = 1e-8;
  FitOptions fit;

  double gamma_for(std::size_t n) const;
};

struct FittedCopula {
  MaxEntCopulaModel model;
  CoMomentTable comeans;
  SelectionResult selection;
};

// Full estimation pipeline: marginals -> LP bases -> comeans -> constraint
// selection -> convex moment matching.
FittedCopula fit_pairs(std::span<const double> xs, std::span<const double> ys,
                       const FitConfig& cfg = {});
FittedCopula fit_table(const ContingencyTable& table, const FitConfig& cfg = {});

}  // namespace lpcop
