#include "lpcop/grid_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lpcop::kernels {

namespace {

constexpr std::size_t kBlockRows = 64;

inline double cell_exponent(const ProductStatGrid& g, std::span<const double> theta,
                            std::span<const double> acoef, std::size_t l) {
  double eta = 0.0;
  for (std::size_t t = 0; t < theta.size(); ++t) eta += acoef[t] * g.yrow[t][l];
  return eta;
}

// Per-row coefficients a_t = theta_t * xrow_t[k], so the inner loop over l is
// a dot product against the y rows.
inline void row_coefs(const ProductStatGrid& g, std::span<const double> theta,
                      std::size_t k, std::vector<double>& a) {
  for (std::size_t t = 0; t < theta.size(); ++t) a[t] = theta[t] * g.xrow[t][k];
}

double max_exponent(const ProductStatGrid& g, std::span<const double> theta) {
  const std::size_t nx = g.px.size(), ny = g.qy.size();
  const std::size_t nblocks = (nx + kBlockRows - 1) / kBlockRows;
  std::vector<double> block_max(nblocks, -std::numeric_limits<double>::infinity());
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nblocks); ++b) {
    std::vector<double> a(theta.size());
    double m = -std::numeric_limits<double>::infinity();
    const std::size_t k_end = std::min(nx, (static_cast<std::size_t>(b) + 1) * kBlockRows);
    for (std::size_t k = static_cast<std::size_t>(b) * kBlockRows; k < k_end; ++k) {
      row_coefs(g, theta, k, a);
      for (std::size_t l = 0; l < ny; ++l)
        m = std::max(m, cell_exponent(g, theta, a, l));
    }
    block_max[static_cast<std::size_t>(b)] = m;
  }
  double m = block_max[0];
  for (double v : block_max) m = std::max(m, v);
  return m;
}

}  // namespace

double log_partition(const ProductStatGrid& g, std::span<const double> theta) {
  if (theta.empty()) return 0.0;
  const std::size_t nx = g.px.size(), ny = g.qy.size();
  const double shift = max_exponent(g, theta);
  const std::size_t nblocks = (nx + kBlockRows - 1) / kBlockRows;
  std::vector<double> block_sum(nblocks, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nblocks); ++b) {
    std::vector<double> a(theta.size());
    double s = 0.0;
    const std::size_t k_end = std::min(nx, (static_cast<std::size_t>(b) + 1) * kBlockRows);
    for (std::size_t k = static_cast<std::size_t>(b) * kBlockRows; k < k_end; ++k) {
      row_coefs(g, theta, k, a);
      double row = 0.0;
      for (std::size_t l = 0; l < ny; ++l)
        row += g.qy[l] * std::exp(cell_exponent(g, theta, a, l) - shift);
      s += g.px[k] * row;
    }
    block_sum[static_cast<std::size_t>(b)] = s;
  }
  double total = 0.0;
  for (double v : block_sum) total += v;
  return shift + std::log(total);
}

GridMoments moments(const ProductStatGrid& g, std::span<const double> theta,
                    bool with_cov) {
  const std::size_t m = theta.size();
  GridMoments out;
  out.mean.assign(m, 0.0);
  if (with_cov) out.cov.assign(m * m, 0.0);
  if (m == 0) return out;

  const std::size_t nx = g.px.size(), ny = g.qy.size();
  const double shift = max_exponent(g, theta);
  const std::size_t nblocks = (nx + kBlockRows - 1) / kBlockRows;
  // block partials: [S0 | S1_t (m) | S2_tu (m*m, upper triangle used)]
  const std::size_t stride = 1 + m + (with_cov ? m * m : 0);
  std::vector<double> partial(nblocks * stride, 0.0);

#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nblocks); ++b) {
    std::vector<double> a(m);
    std::vector<double> row1(m);
    std::vector<double> row2(with_cov ? m * m : 0);
    double* acc = partial.data() + static_cast<std::size_t>(b) * stride;
    const std::size_t k_end = std::min(nx, (static_cast<std::size_t>(b) + 1) * kBlockRows);
    for (std::size_t k = static_cast<std::size_t>(b) * kBlockRows; k < k_end; ++k) {
      row_coefs(g, theta, k, a);
      double row0 = 0.0;
      std::fill(row1.begin(), row1.end(), 0.0);
      std::fill(row2.begin(), row2.end(), 0.0);
      for (std::size_t l = 0; l < ny; ++l) {
        const double w = g.qy[l] * std::exp(cell_exponent(g, theta, a, l) - shift);
        row0 += w;
        for (std::size_t t = 0; t < m; ++t) row1[t] += w * g.yrow[t][l];
        if (with_cov) {
          for (std::size_t t = 0; t < m; ++t) {
            const double wt = w * g.yrow[t][l];
            for (std::size_t u = t; u < m; ++u)
              row2[t * m + u] += wt * g.yrow[u][l];
          }
        }
      }
      acc[0] += g.px[k] * row0;
      for (std::size_t t = 0; t < m; ++t)
        acc[1 + t] += g.px[k] * g.xrow[t][k] * row1[t];
      if (with_cov) {
        for (std::size_t t = 0; t < m; ++t)
          for (std::size_t u = t; u < m; ++u)
            acc[1 + m + t * m + u] +=
                g.px[k] * g.xrow[t][k] * g.xrow[u][k] * row2[t * m + u];
      }
    }
  }

  double s0 = 0.0;
  std::vector<double> s1(m, 0.0), s2(with_cov ? m * m : 0, 0.0);
  for (std::size_t b = 0; b < nblocks; ++b) {
    const double* acc = partial.data() + b * stride;
    s0 += acc[0];
    for (std::size_t t = 0; t < m; ++t) s1[t] += acc[1 + t];
    if (with_cov)
      for (std::size_t t = 0; t < m; ++t)
        for (std::size_t u = t; u < m; ++u) s2[t * m + u] += acc[1 + m + t * m + u];
  }
  out.log_z = shift + std::log(s0);
  for (std::size_t t = 0; t < m; ++t) out.mean[t] = s1[t] / s0;
  if (with_cov) {
    for (std::size_t t = 0; t < m; ++t)
      for (std::size_t u = t; u < m; ++u) {
        const double c = s2[t * m + u] / s0 - out.mean[t] * out.mean[u];
        out.cov[t * m + u] = c;
        out.cov[u * m + t] = c;
      }
  }
  return out;
}

void set_max_threads(int n) {
#ifdef _OPENMP
  if (n > 0)
    omp_set_num_threads(n);
  else
    omp_set_num_threads(omp_get_num_procs());
#else
  (void)n;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace serial {

double log_partition(const ProductStatGrid& g, std::span<const double> theta) {
  if (theta.empty()) return 0.0;
  const std::size_t nx = g.px.size(), ny = g.qy.size();
  double shift = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < nx; ++k)
    for (std::size_t l = 0; l < ny; ++l) {
      double eta = 0.0;
      for (std::size_t t = 0; t < theta.size(); ++t)
        eta += theta[t] * g.xrow[t][k] * g.yrow[t][l];
      shift = std::max(shift, eta);
    }
  double s = 0.0;
  for (std::size_t k = 0; k < nx; ++k)
    for (std::size_t l = 0; l < ny; ++l) {
      double eta = 0.0;
      for (std::size_t t = 0; t < theta.size(); ++t)
        eta += theta[t] * g.xrow[t][k] * g.yrow[t][l];
      s += g.px[k] * g.qy[l] * std::exp(eta - shift);
    }
  return shift + std::log(s);
}

GridMoments moments(const ProductStatGrid& g, std::span<const double> theta,
                    bool with_cov) {
  const std::size_t m = theta.size();
  GridMoments out;
  out.mean.assign(m, 0.0);
  if (with_cov) out.cov.assign(m * m, 0.0);
  if (m == 0) return out;
  out.log_z = serial::log_partition(g, theta);
  const std::size_t nx = g.px.size(), ny = g.qy.size();
  std::vector<double> s(m, 0.0);
  for (std::size_t k = 0; k < nx; ++k)
    for (std::size_t l = 0; l < ny; ++l) {
      double eta = 0.0;
      for (std::size_t t = 0; t < m; ++t) {
        s[t] = g.xrow[t][k] * g.yrow[t][l];
        eta += theta[t] * s[t];
      }
      const double w = g.px[k] * g.qy[l] * std::exp(eta - out.log_z);
      for (std::size_t t = 0; t < m; ++t) out.mean[t] += w * s[t];
      if (with_cov)
        for (std::size_t t = 0; t < m; ++t)
          for (std::size_t u = 0; u < m; ++u) out.cov[t * m + u] += w * s[t] * s[u];
    }
  if (with_cov)
    for (std::size_t t = 0; t < m; ++t)
      for (std::size_t u = 0; u < m; ++u)
        out.cov[t * m + u] -= out.mean[t] * out.mean[u];
  return out;
}

}  // namespace serial

}  // namespace lpcop::kernels
