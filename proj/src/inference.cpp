#include "lpcop/inference.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>
#include <vector>

namespace lpcop {

double mutual_information(const MaxEntCopulaModel& m) {
  if (m.theta().empty()) return 0.0;
  const auto expected = m.model_comeans();
  double s = 0.0;
  for (std::size_t t = 0; t < expected.size(); ++t) s += m.theta()[t] * expected[t];
  return s - m.log_z();
}

double empirical_mi(const ContingencyTable& t) {
  double mi = 0.0;
  for (std::size_t k = 0; k < t.rows(); ++k)
    for (std::size_t l = 0; l < t.cols(); ++l) {
      const double c = t.count(k, l);
      if (c == 0.0) continue;
      const double p = c / t.n();
      mi += p * std::log(p * t.n() * t.n() / (t.row_margin(k) * t.col_margin(l)));
    }
  return mi;
}

TestReport g2_test(const ContingencyTable& t) {
  TestReport r;
  r.method = TestMethod::g2;
  r.n = static_cast<std::size_t>(t.n());
  r.statistic = 2.0 * t.n() * empirical_mi(t);
  r.df = static_cast<int>((t.rows() - 1) * (t.cols() - 1));
  r.p_value = r.df > 0 ? chi_square_sf(r.statistic, r.df) : 1.0;
  return r;
}

TestReport smooth_g2_test(const ContingencyTable& t, const FitConfig& cfg) {
  const auto fitted = fit_table(t, cfg);
  TestReport r;
  r.method = TestMethod::smooth_g2;
  r.n = static_cast<std::size_t>(t.n());
  r.df = static_cast<int>(fitted.selection.chosen.size());
  r.statistic = 2.0 * t.n() * mutual_information(fitted.model);
  r.p_value = r.df > 0 ? chi_square_sf(r.statistic, r.df) : 1.0;
  return r;
}

namespace {

// SplitMix64: tiny, platform-independent generator so permutation p-values
// reproduce bit-for-bit everywhere.
struct SplitMix64 {
  std::uint64_t state;
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  // uniform draw in [0, bound) by 128-bit multiply-shift
  std::uint64_t bounded(std::uint64_t bound) {
    __extension__ using u128 = unsigned __int128;
    return static_cast<std::uint64_t>((static_cast<u128>(next()) * bound) >> 64);
  }
};

void shuffle_in_place(std::vector<double>& v, SplitMix64& rng) {
  for (std::size_t i = v.size() - 1; i > 0; --i)
    std::swap(v[i], v[rng.bounded(i + 1)]);
}

}  // namespace

TestReport mi_permutation_test(std::span<const double> xs, std::span<const double> ys,
                               const FitConfig& cfg, int permutations,
                               std::uint64_t seed) {
  if (permutations < 99)
    throw std::invalid_argument("permutation test needs at least 99 replicates");
  const auto observed = fit_pairs(xs, ys, cfg);
  const double mi_obs = mutual_information(observed.model);

  int exceed = 0;
  std::exception_ptr error;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) reduction(+ : exceed)
#endif
  for (int b = 0; b < permutations; ++b) {
    try {
      // each replicate derives its stream from (seed, b), so the result does
      // not depend on scheduling
      SplitMix64 rng{seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(b + 1)};
      std::vector<double> perm(ys.begin(), ys.end());
      shuffle_in_place(perm, rng);
      const auto rep = fit_pairs(xs, perm, cfg);
      if (mutual_information(rep.model) >= mi_obs) ++exceed;
    } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);

  TestReport r;
  r.method = TestMethod::mi_permutation;
  r.n = xs.size();
  r.statistic = mi_obs;
  r.df = static_cast<int>(observed.selection.chosen.size());
  r.p_value = (1.0 + exceed) / (permutations + 1.0);
  return r;
}

namespace {

// Regularized incomplete gamma pair, series for x < a+1 and Lentz continued
// fraction otherwise.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int i = 0; i < 1000; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 1000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double chi_square_sf(double x, int df) {
  if (df < 1) throw std::invalid_argument("chi-square df must be >= 1");
  if (!(x >= 0.0)) throw std::invalid_argument("chi-square statistic must be >= 0");
  if (x == 0.0) return 1.0;
  const double a = 0.5 * df, hx = 0.5 * x;
  if (hx < a + 1.0) return 1.0 - gamma_p_series(a, hx);
  return gamma_q_cf(a, hx);
}

}  // namespace lpcop
