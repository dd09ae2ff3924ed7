#include <doctest.h>

#include <cmath>
#include <vector>

#include "lpcop/grid_kernels.hpp"
#include "lpcop/lp_basis.hpp"
#include "lpcop/marginal.hpp"
#include "test_support.hpp"

namespace {

struct GridFixture {
  lpcop::LpBasis bx, by;
  std::vector<std::pair<int, int>> indices;
  std::vector<double> theta;
  lpcop::kernels::ProductStatGrid grid;

  GridFixture(testsup::Rng& rng, std::size_t kx, std::size_t ky, int deg)
      : bx(lpcop::LpBasis::build(testsup::random_marginal(rng, kx),
                                 std::min<int>(deg, static_cast<int>(kx) - 1))),
        by(lpcop::LpBasis::build(testsup::random_marginal(rng, ky),
                                 std::min<int>(deg, static_cast<int>(ky) - 1))) {
    for (int j = 1; j <= bx.degree(); ++j)
      for (int k = 1; k <= by.degree(); ++k) {
        indices.emplace_back(j, k);
        theta.push_back(rng.uniform(-0.5, 0.5));
      }
    grid.px = bx.marginal().probs();
    grid.qy = by.marginal().probs();
    for (const auto& [j, k] : indices) {
      grid.xrow.push_back(bx.row(j).data());
      grid.yrow.push_back(by.row(k).data());
    }
  }
};

// independent oracle: plain double loop without shift, for small tables
double naive_log_partition(const GridFixture& f) {
  double z = 0.0;
  for (std::size_t k = 0; k < f.grid.px.size(); ++k)
    for (std::size_t l = 0; l < f.grid.qy.size(); ++l) {
      double eta = 0.0;
      for (std::size_t t = 0; t < f.theta.size(); ++t)
        eta += f.theta[t] * f.grid.xrow[t][k] * f.grid.yrow[t][l];
      z += f.grid.px[k] * f.grid.qy[l] * std::exp(eta);
    }
  return std::log(z);
}

}  // namespace

TEST_CASE("log partition of the empty model is zero") {
  testsup::Rng rng(3);
  GridFixture f(rng, 5, 4, 2);
  CHECK(lpcop::kernels::log_partition(f.grid, {}) == 0.0);
}

TEST_CASE("production log partition matches the naive double loop on small grids") {
  testsup::Rng rng(5);
  for (int rep = 0; rep < 40; ++rep) {
    GridFixture f(rng, 2 + rng.index(4), 2 + rng.index(4), 3);
    const double naive = naive_log_partition(f);
    CHECK(lpcop::kernels::log_partition(f.grid, f.theta) ==
          doctest::Approx(naive).epsilon(1e-12));
    CHECK(lpcop::kernels::serial::log_partition(f.grid, f.theta) ==
          doctest::Approx(naive).epsilon(1e-12));
  }
}

TEST_CASE("parallel kernels agree with the serial reference on large grids") {
  testsup::Rng rng(9);
  GridFixture f(rng, 300, 257, 4);
  const auto ser = lpcop::kernels::serial::moments(f.grid, f.theta, true);
  const auto par = lpcop::kernels::moments(f.grid, f.theta, true);
  CHECK(par.log_z == doctest::Approx(ser.log_z).epsilon(1e-13));
  for (std::size_t t = 0; t < ser.mean.size(); ++t)
    CHECK(par.mean[t] == doctest::Approx(ser.mean[t]).epsilon(1e-12));
  for (std::size_t t = 0; t < ser.cov.size(); ++t)
    CHECK(par.cov[t] == doctest::Approx(ser.cov[t]).epsilon(1e-11));
}

TEST_CASE("results do not depend on the thread count") {
  testsup::Rng rng(13);
  GridFixture f(rng, 200, 150, 3);
  lpcop::kernels::set_max_threads(1);
  const double z1 = lpcop::kernels::log_partition(f.grid, f.theta);
  const auto m1 = lpcop::kernels::moments(f.grid, f.theta, true);
  lpcop::kernels::set_max_threads(4);
  const double z4 = lpcop::kernels::log_partition(f.grid, f.theta);
  const auto m4 = lpcop::kernels::moments(f.grid, f.theta, true);
  lpcop::kernels::set_max_threads(0);
  CHECK(z1 == z4);  // bitwise: block partials are reduced in a fixed order
  CHECK(m1.mean == m4.mean);
  CHECK(m1.cov == m4.cov);
}

TEST_CASE("max shift keeps large exponents finite") {
  testsup::Rng rng(17);
  GridFixture f(rng, 40, 40, 2);
  for (double& t : f.theta) t *= 600.0;  // exponents far beyond exp range
  const double z = lpcop::kernels::log_partition(f.grid, f.theta);
  CHECK(std::isfinite(z));
  const auto m = lpcop::kernels::moments(f.grid, f.theta, false);
  CHECK(std::isfinite(m.log_z));
  for (double v : m.mean) CHECK(std::isfinite(v));
}
