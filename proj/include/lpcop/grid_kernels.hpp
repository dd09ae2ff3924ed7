#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace lpcop::kernels {

// Selected product statistics s_t(k,l) = xrow[t][k] * yrow[t][l] over the
// K_x x K_y atom-cell grid with cell weights px[k] * qy[l]. Because the LP
// bases are piecewise constant on marginal probability cells, every integral
// over the unit square reduces to a weighted sum over this grid.
struct ProductStatGrid {
  std::span<const double> px;
  std::span<const double> qy;
  std::vector<const double*> xrow;
  std::vector<const double*> yrow;
  std::size_t nstats() const { return xrow.size(); }
};

struct GridMoments {
  double log_z = 0.0;
  std::vector<double> mean;  // E_theta[s_t]
  std::vector<double> cov;   // Cov_theta(s_t, s_u), nstats x nstats row-major
};

// Production kernels. Work is split over fixed-size row blocks (OpenMP when
// available); block partials are accumulated serially within a block and
// reduced in block order, so results are identical for any thread count.
double log_partition(const ProductStatGrid& g, std::span<const double> theta);
GridMoments moments(const ProductStatGrid& g, std::span<const double> theta,
                    bool with_cov);

// Bounds worker threads for all kernels (and OpenMP regions elsewhere in the
// library); n <= 0 restores the OpenMP default.
void set_max_threads(int n);
int max_threads();

namespace serial {
// Reference implementations kept for testing: plain nested loops with a
// single accumulator walked in cell order.
double log_partition(const ProductStatGrid& g, std::span<const double> theta);
GridMoments moments(const ProductStatGrid& g, std::span<const double> theta,
                    bool with_cov);
}  // namespace serial

}  // namespace lpcop::kernels
