#pragma once

#include <array>
#include <vector>

#include "lpcop/maxent.hpp"
#include "lpcop/pipeline.hpp"
#include "lpcop/table.hpp"

namespace lpcop {

// Spectral (log-linear) form of a copula model: intrinsic association
// parameters mu_j with row scores phi_j and column scores psi_j evaluated on
// the support atoms, plus the display constant mu0.
struct LogLinearModel {
  // Intrinsic association per component. SVD-derived models carry the
  // non-increasing singular values (components below 1e-12 dropped); the
  // plug-in analysis re-estimates them against the observed table.
  std::vector<double> mu;
  double mu0 = 0.0;
  std::vector<std::vector<double>> row_scores;  // [component][row atom]
  std::vector<std::vector<double>> col_scores;  // [component][col atom]

  int components() const { return static_cast<int>(mu.size()); }
  std::size_t n_rows() const { return row_scores.empty() ? 0 : row_scores[0].size(); }
  std::size_t n_cols() const { return col_scores.empty() ? 0 : col_scores[0].size(); }
};

// SVD of the fitted Theta-matrix. Scores are linear combinations of the LP
// bases through the singular vectors; sign convention: first nonzero entry
// of each left singular vector is positive. mu0 = -log Z.
LogLinearModel to_loglinear(const MaxEntCopulaModel& m);

// Exact Goodman decomposition of a strictly positive table: project
// log(p~_kl) onto the full LP product basis under p~_k+ p~_+l weights and
// rotate to diagonal form. Throws on zero cells.
LogLinearModel saturated_plugin(const ContingencyTable& t);

// Plug-in intrinsic association parameters for given scores:
// mu_j = sum_kl log(p~_kl) p~_k+ p~_+l phi_jk psi_jl. Throws on zero cells.
std::vector<double> intrinsic_association(const ContingencyTable& t,
                                          const LogLinearModel& scores);

// sum_j mu_j (phi_jk - phi_jk') (psi_jl - psi_jl'); exact for the saturated
// plug-in model on strictly positive tables.
double log_odds_ratio(const LogLinearModel& m, std::size_t k, std::size_t k2,
                      std::size_t l, std::size_t l2);

struct BiplotPoints {
  std::vector<std::array<double, 2>> row_points;  // (mu_1 phi_1k, mu_2 phi_2k)
  std::vector<std::array<double, 2>> col_points;
};

// Top-two-component logratio biplot coordinates; a rank-1 model is padded
// with a zero second axis.
BiplotPoints biplot_coordinates(const LogLinearModel& m);

// Table analysis pipeline: MaxEnt fit -> spectral scores from the Theta SVD;
// on strictly positive tables the reported mu are re-estimated by the
// plug-in formula and mu0 is the weighted mean of the observed log-ratio,
// otherwise the SVD singular values and -log Z are kept (the smooth route
// for sparse tables).
LogLinearModel loglinear_analysis(const ContingencyTable& t, const FitConfig& cfg = {});

}  // namespace lpcop
