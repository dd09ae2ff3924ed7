#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "lpcop/comoments.hpp"
#include "lpcop/grid_kernels.hpp"
#include "lpcop/lp_basis.hpp"
#include "lpcop/table.hpp"

namespace lpcop {

struct FitOptions {
  double tol = 1e-8;   // max-norm of the moment-matching gradient
  int max_iter = 200;
};

struct FitReport {
  int iterations = 0;
  double grad_norm = 0.0;
  bool gradient_fallback = false;  // a singular Hessian forced gradient steps
};

class FitNonConvergence : public std::runtime_error {
public:
  FitNonConvergence(double grad_norm, int iterations);
  double grad_norm;
  int iterations;
};

enum class CcdSide { x_given_y, y_given_x };

// Exponent coefficients of one copula slice d(.|condition). The raw constant
// shares the copula's -log Z; the normalized constant makes the slice
// integrate to 1 under the conditioned marginal.
struct CcdSlice {
  CcdSide side;
  double condition_atom = 0.0;
  std::vector<double> coefficients;  // one per free-side order j = 1..degree
  double raw_constant = 0.0;
  double normalized_constant = 0.0;
  LpBasis basis;  // free-side basis

  double evaluate_raw(double atom) const;
  double evaluate(double atom) const;  // renormalized density value
};

// Fitted log-bilinear MaxEnt copula: cop(u,v) = exp(sum theta_t S_j S_k - log Z),
// piecewise constant on the product of marginal probability cells.
class MaxEntCopulaModel {
public:
  // Convex moment matching: minimizes log Z(theta) - <theta, comeans> by
  // Newton with Armijo step-halving from theta = 0. The Hessian is the
  // covariance of the selected sufficient statistics under the current model.
  static MaxEntCopulaModel fit(const CoMomentTable& t, const SelectionResult& sel,
                               LpBasis bx, LpBasis by, const FitOptions& opt = {});

  // Model with given coefficients; log Z recomputed exactly over the grid.
  static MaxEntCopulaModel from_parameters(LpBasis bx, LpBasis by,
                                           std::vector<std::pair<int, int>> indices,
                                           std::vector<double> theta);

  // Deserialization path: trusts the stored log Z.
  static MaxEntCopulaModel from_stored(LpBasis bx, LpBasis by,
                                       std::vector<std::pair<int, int>> indices,
                                       std::vector<double> theta, double log_z);

  const LpBasis& basis_x() const { return bx_; }
  const LpBasis& basis_y() const { return by_; }
  const std::vector<std::pair<int, int>>& indices() const { return indices_; }
  const std::vector<double>& theta() const { return theta_; }
  const std::vector<double>& comeans() const { return comeans_; }
  double log_z() const { return log_z_; }
  const FitReport& report() const { return report_; }

  double exponent_cell(std::size_t k, std::size_t l) const;
  double density_cell(std::size_t k, std::size_t l) const;
  double density(double u, double v) const;

  // E_theta[S_j S_k] per selected index (equals the comeans at convergence).
  std::vector<double> model_comeans() const;

  CcdSlice ccd_slice(CcdSide side, double condition_atom) const;

  // Smoothed cell probabilities p(k,l) = p_k q_l cop(cell k, cell l) at the
  // table's cells; the table's row/column values must lie on the model
  // marginals' supports.
  std::vector<double> smooth_cells(const ContingencyTable& table) const;

  kernels::ProductStatGrid stat_grid() const;

private:
  MaxEntCopulaModel(LpBasis bx, LpBasis by)
      : bx_(std::move(bx)), by_(std::move(by)) {}

  LpBasis bx_, by_;
  std::vector<std::pair<int, int>> indices_;
  std::vector<double> theta_;
  std::vector<double> comeans_;  // matched constraint values
  double log_z_ = 0.0;
  FitReport report_;
};

// log of the exact cell-sum partition function for given coefficients.
double log_partition(const LpBasis& bx, const LpBasis& by,
                     std::span<const std::pair<int, int>> indices,
                     std::span<const double> theta);

}  // namespace lpcop
