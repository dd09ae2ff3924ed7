#pragma once

#include <cstdint>
#include <span>

#include "lpcop/maxent.hpp"
#include "lpcop/pipeline.hpp"
#include "lpcop/table.hpp"

namespace lpcop {

enum class TestMethod { g2, smooth_g2, mi_permutation };

struct TestReport {
  double statistic = 0.0;
  int df = 0;  // effective degrees of freedom (selected model size)
  double p_value = 1.0;
  TestMethod method = TestMethod::g2;
  std::size_t n = 0;
};

// MI under the fitted model: sum_t theta_t E_theta[S_j S_k] - log Z, the
// KL divergence of the copula from uniformity; zero iff theta is empty.
double mutual_information(const MaxEntCopulaModel& m);

// Raw nonparametric estimate sum p~ log(p~ / p~_row p~_col); empty cells
// contribute zero.
double empirical_mi(const ContingencyTable& t);

// Log-likelihood ratio test: statistic 2n MI~, df (I-1)(J-1), chi-square tail.
TestReport g2_test(const ContingencyTable& t);

// Smoothed version: 2n times the model MI of the MaxEnt fit, referenced to
// chi-square with the selected model's dimension as degrees of freedom.
TestReport smooth_g2_test(const ContingencyTable& t, const FitConfig& cfg = {});

// Permutation null for the model MI: refits on permutations of the y column
// (marginals preserved exactly); p = (1 + #{MI_perm >= MI_obs}) / (B + 1).
// Deterministic for a fixed seed, independent of thread count.
TestReport mi_permutation_test(std::span<const double> xs, std::span<const double> ys,
                               const FitConfig& cfg, int permutations,
                               std::uint64_t seed);

// Upper-tail chi-square probability via the regularized upper incomplete
// gamma function (series / continued-fraction split at x ~ df).
double chi_square_sf(double x, int df);

}  // namespace lpcop
