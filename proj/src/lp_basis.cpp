#include "lpcop/lp_basis.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lpcop {

namespace {

double weighted_dot(std::span<const double> probs, const double* a, const double* b) {
  double s = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) s += probs[k] * a[k] * b[k];
  return s;
}

}  // namespace

LpBasis LpBasis::build(const Marginal& m, int degree) {
  const std::size_t K = m.size();
  if (degree < 1) throw std::invalid_argument("basis degree must be >= 1");
  if (static_cast<std::size_t>(degree) > K - 1)
    throw std::invalid_argument("basis order exceeds support size");

  LpBasis b;
  b.marginal_ = m;
  b.degree_ = degree;
  b.table_.assign(static_cast<std::size_t>(degree) * K, 0.0);
  const std::span<const double> probs(m.probs());

  double p3 = 0.0;
  for (double p : m.probs()) p3 += p * p * p;
  const double scale = std::sqrt(12.0) / std::sqrt(1.0 - p3);
  double* t1 = b.table_.data();
  for (std::size_t k = 0; k < K; ++k) t1[k] = scale * (m.mid_at(k) - 0.5);

  std::vector<double> work(K);
  for (int j = 2; j <= degree; ++j) {
    // next candidate: T_1^j
    for (std::size_t k = 0; k < K; ++k) work[k] = std::pow(t1[k], j);
    double pre_norm = std::sqrt(weighted_dot(probs, work.data(), work.data()));
    // modified Gram-Schmidt against the constant and rows 1..j-1,
    // with one re-orthogonalization pass
    for (int pass = 0; pass < 2; ++pass) {
      double mean = 0.0;
      for (std::size_t k = 0; k < K; ++k) mean += probs[k] * work[k];
      for (std::size_t k = 0; k < K; ++k) work[k] -= mean;
      for (int i = 1; i < j; ++i) {
        const double* ri = b.table_.data() + static_cast<std::size_t>(i - 1) * K;
        const double c = weighted_dot(probs, work.data(), ri);
        for (std::size_t k = 0; k < K; ++k) work[k] -= c * ri[k];
      }
    }
    const double norm = std::sqrt(weighted_dot(probs, work.data(), work.data()));
    if (!(norm > 1e-10 * pre_norm) || !(norm > 0.0))
      throw std::invalid_argument("degenerate basis at order " + std::to_string(j));
    double* rj = b.table_.data() + static_cast<std::size_t>(j - 1) * K;
    for (std::size_t k = 0; k < K; ++k) rj[k] = work[k] / norm;
  }
  return b;
}

double LpBasis::eval_u(int j, double u) const {
  if (j < 1 || j > degree_) throw std::invalid_argument("basis order out of range");
  return at(j, marginal_.cell_of_u(u));
}

double LpBasis::eval_x(int j, double x) const {
  if (j < 1 || j > degree_) throw std::invalid_argument("basis order out of range");
  return at(j, marginal_.index_of(x));
}

int max_degree_default(const Marginal& m, int cap) {
  if (cap < 1) throw std::invalid_argument("basis cap must be >= 1");
  const int kmax = static_cast<int>(m.size()) - 1;
  return kmax < cap ? kmax : cap;
}

}  // namespace lpcop
