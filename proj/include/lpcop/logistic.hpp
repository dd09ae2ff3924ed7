#pragma once

#include <string>
#include <vector>

#include "lpcop/lp_basis.hpp"
#include "lpcop/maxent.hpp"

namespace lpcop {

enum class BinarySide { x, y };

// Logit model derived from a binary-response copula fit:
// logit mu(x) = alpha_0 + sum_j alpha_j T_j(x), with alpha_0 = logit(mu) and
// alpha_j = theta_j1 / sqrt(mu (1 - mu)). mu is the mass of the upper atom
// of the binary marginal.
struct CopulaLogisticModel {
  double alpha0 = 0.0;
  std::vector<double> alphas;  // per predictor-side order j
  LpBasis basis;               // predictor-side basis
  double mu = 0.0;

  double linear_predictor(double x) const;
  // Off-support continuous x snaps to the nearest training atom.
  double predict_proba(double x) const;
};

CopulaLogisticModel copula_logistic(const MaxEntCopulaModel& m, BinarySide binary_side);

// Column-stacked LP feature matrix for external penalized solvers: for each
// predictor, columns T_1..T_m evaluated at the observations, named
// "var:order". Constant columns are skipped.
struct FeatureMatrix {
  std::size_t n_rows = 0;
  std::vector<std::string> column_names;
  std::vector<double> values;  // row-major, n_rows x column_names.size()
  struct VariableBasis {
    std::string name;
    int orders = 0;
    std::vector<double> atoms;
    std::vector<double> table;  // orders x atoms, row-major
  };
  std::vector<VariableBasis> schema;
  std::vector<std::string> skipped;  // constant predictors

  double at(std::size_t row, std::size_t col) const {
    return values[row * column_names.size() + col];
  }
};

FeatureMatrix feature_matrix(const std::vector<std::vector<double>>& columns,
                             const std::vector<std::string>& names, int max_order);

}  // namespace lpcop
