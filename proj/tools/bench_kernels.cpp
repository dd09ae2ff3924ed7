// Times the production (OpenMP) grid kernels against the serial reference on
// synthetic continuous-by-continuous problems, where the atom-cell grid is
// n x n. Run with LPCOP_THREADS to pin the thread count.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "lpcop/grid_kernels.hpp"
#include "lpcop/lp_basis.hpp"
#include "lpcop/marginal.hpp"
#include "lpcop/maxent.hpp"
#include "lpcop/pipeline.hpp"

using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct Problem {
  lpcop::LpBasis bx, by;
  std::vector<std::pair<int, int>> indices;
  std::vector<double> theta;
  lpcop::kernels::ProductStatGrid grid;
};

Problem make_problem(std::size_t n) {
  std::vector<double> xs(n), ys(n);
  std::uint64_t s = 0x2545f4914f6cdd1dULL;
  auto next = [&s]() {
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    return static_cast<double>(s >> 11) / 9007199254740992.0;
  };
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = next();
    ys[i] = 0.6 * xs[i] + 0.4 * next();
  }
  Problem p{lpcop::LpBasis::build(lpcop::Marginal::from_samples(xs), 4),
            lpcop::LpBasis::build(lpcop::Marginal::from_samples(ys), 4),
            {{1, 1}, {1, 2}, {2, 1}, {2, 2}, {3, 3}, {4, 4}},
            {0.9, -0.2, 0.15, 0.3, -0.1, 0.05},
            {}};
  p.grid.px = p.bx.marginal().probs();
  p.grid.qy = p.by.marginal().probs();
  for (const auto& [j, k] : p.indices) {
    p.grid.xrow.push_back(p.bx.row(j).data());
    p.grid.yrow.push_back(p.by.row(k).data());
  }
  return p;
}

template <typename F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    f();
    best = std::min(best, ms_since(t0));
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* env = std::getenv("LPCOP_THREADS"))
    lpcop::kernels::set_max_threads(std::atoi(env));
  std::vector<std::size_t> sizes{512, 2048, 4096};
  int reps = 3;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--sizes" && i + 1 < argc) {
      sizes.clear();
      std::string list = argv[++i];
      std::size_t pos = 0;
      while (pos != std::string::npos) {
        const auto comma = list.find(',', pos);
        sizes.push_back(std::strtoull(list.c_str() + pos, nullptr, 10));
        pos = comma == std::string::npos ? comma : comma + 1;
      }
    } else if (arg == "--reps" && i + 1 < argc) {
      reps = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: bench_kernels [--sizes a,b,c] [--reps r]\n");
      return 1;
    }
  }

  std::printf("threads: %d\n", lpcop::kernels::max_threads());
  std::printf("%-10s %-22s %12s %12s %9s %14s\n", "grid", "kernel", "serial(ms)",
              "parallel(ms)", "speedup", "max|diff|");
  for (std::size_t n : sizes) {
    const auto p = make_problem(n);

    volatile double sink = 0.0;
    double ref = 0.0, got = 0.0;
    const double t_ser_lz = best_of(reps, [&] {
      ref = lpcop::kernels::serial::log_partition(p.grid, p.theta);
      sink = ref;
    });
    const double t_par_lz = best_of(reps, [&] {
      got = lpcop::kernels::log_partition(p.grid, p.theta);
      sink = got;
    });
    std::printf("%-10s %-22s %12.3f %12.3f %8.2fx %14.3e\n",
                (std::to_string(n) + "x" + std::to_string(n)).c_str(), "log_partition",
                t_ser_lz, t_par_lz, t_ser_lz / t_par_lz, std::fabs(ref - got));

    lpcop::kernels::GridMoments ms, mp;
    const double t_ser_mom = best_of(reps, [&] {
      ms = lpcop::kernels::serial::moments(p.grid, p.theta, true);
      sink = ms.log_z;
    });
    const double t_par_mom = best_of(reps, [&] {
      mp = lpcop::kernels::moments(p.grid, p.theta, true);
      sink = mp.log_z;
    });
    double diff = std::fabs(ms.log_z - mp.log_z);
    for (std::size_t t = 0; t < ms.mean.size(); ++t)
      diff = std::max(diff, std::fabs(ms.mean[t] - mp.mean[t]));
    for (std::size_t t = 0; t < ms.cov.size(); ++t)
      diff = std::max(diff, std::fabs(ms.cov[t] - mp.cov[t]));
    std::printf("%-10s %-22s %12.3f %12.3f %8.2fx %14.3e\n",
                (std::to_string(n) + "x" + std::to_string(n)).c_str(),
                "moments+covariance", t_ser_mom, t_par_mom, t_ser_mom / t_par_mom,
                diff);
    (void)sink;
  }
  return 0;
}
