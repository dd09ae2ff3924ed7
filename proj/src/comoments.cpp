#include "lpcop/comoments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lpcop {

namespace {

constexpr std::size_t kBlockObs = 4096;

struct RankedEntry {
  double abs_value;
  int j, k;  // 1-based
};

// Descending by |value|; ties broken by lower j+k, then lower j, so the
// ordering is identical across platforms.
bool ranked_before(const RankedEntry& a, const RankedEntry& b) {
  if (a.abs_value != b.abs_value) return a.abs_value > b.abs_value;
  if (a.j + a.k != b.j + b.k) return a.j + a.k < b.j + b.k;
  return a.j < b.j;
}

std::vector<RankedEntry> ranked(const CoMomentTable& t) {
  std::vector<RankedEntry> entries;
  entries.reserve(static_cast<std::size_t>(t.m1) * t.m2);
  for (int j = 1; j <= t.m1; ++j)
    for (int k = 1; k <= t.m2; ++k)
      entries.push_back({std::abs(t.at(j, k)), j, k});
  std::sort(entries.begin(), entries.end(), ranked_before);
  return entries;
}

}  // namespace

CoMomentTable comoments(const LpBasis& bx, const LpBasis& by,
                        std::span<const double> xs, std::span<const double> ys) {
  if (xs.empty()) throw std::invalid_argument("empty observation list");
  if (xs.size() != ys.size())
    throw std::invalid_argument("paired observations required");

  const std::size_t n = xs.size();
  std::vector<std::size_t> xi(n), yi(n);
  for (std::size_t i = 0; i < n; ++i) {
    xi[i] = bx.marginal().index_of(xs[i]);
    yi[i] = by.marginal().index_of(ys[i]);
  }

  const int m1 = bx.degree(), m2 = by.degree();
  const std::size_t m = static_cast<std::size_t>(m1) * m2;
  const std::size_t nblocks = (n + kBlockObs - 1) / kBlockObs;
  std::vector<double> partial(nblocks * m, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nblocks); ++b) {
    double* acc = partial.data() + static_cast<std::size_t>(b) * m;
    const std::size_t end = std::min(n, (static_cast<std::size_t>(b) + 1) * kBlockObs);
    for (std::size_t i = static_cast<std::size_t>(b) * kBlockObs; i < end; ++i) {
      for (int j = 0; j < m1; ++j) {
        const double tx = bx.at(j + 1, xi[i]);
        for (int k = 0; k < m2; ++k)
          acc[static_cast<std::size_t>(j) * m2 + k] += tx * by.at(k + 1, yi[i]);
      }
    }
  }

  CoMomentTable t;
  t.m1 = m1;
  t.m2 = m2;
  t.n = n;
  t.values.assign(m, 0.0);
  for (std::size_t b = 0; b < nblocks; ++b)
    for (std::size_t e = 0; e < m; ++e) t.values[e] += partial[b * m + e];
  for (double& v : t.values) v /= static_cast<double>(n);
  return t;
}

CoMomentTable comoments(const LpBasis& bx, const LpBasis& by,
                        const ContingencyTable& table) {
  // empty rows/columns carry no observations and need no support atom
  std::vector<std::size_t> xi(table.rows(), 0), yi(table.cols(), 0);
  for (std::size_t k = 0; k < table.rows(); ++k)
    if (table.row_margin(k) > 0.0)
      xi[k] = bx.marginal().index_of(table.row_values()[k]);
  for (std::size_t l = 0; l < table.cols(); ++l)
    if (table.col_margin(l) > 0.0)
      yi[l] = by.marginal().index_of(table.col_values()[l]);

  const int m1 = bx.degree(), m2 = by.degree();
  CoMomentTable t;
  t.m1 = m1;
  t.m2 = m2;
  t.n = static_cast<std::size_t>(table.n());
  t.values.assign(static_cast<std::size_t>(m1) * m2, 0.0);
  for (std::size_t k = 0; k < table.rows(); ++k)
    for (std::size_t l = 0; l < table.cols(); ++l) {
      const double w = table.count(k, l) / table.n();
      if (w == 0.0) continue;
      for (int j = 0; j < m1; ++j) {
        const double tx = bx.at(j + 1, xi[k]);
        for (int c = 0; c < m2; ++c)
          t.values[static_cast<std::size_t>(j) * m2 + c] +=
              w * tx * by.at(c + 1, yi[l]);
      }
    }
  return t;
}

SelectionResult select(const CoMomentTable& t, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("penalty gamma must be positive");
  SelectionResult r;
  r.gamma = gamma;
  const auto entries = ranked(t);
  double run = 0.0;
  double best = 0.0;
  std::size_t best_q = 0;  // smallest maximizing q; empty if all PenSum <= 0
  r.pensum_trace.reserve(entries.size());
  for (std::size_t q = 1; q <= entries.size(); ++q) {
    run += entries[q - 1].abs_value * entries[q - 1].abs_value;
    const double pensum = run - gamma / static_cast<double>(t.n) * static_cast<double>(q);
    r.pensum_trace.push_back(pensum);
    if (pensum > best) {
      best = pensum;
      best_q = q;
    }
  }
  for (std::size_t q = 0; q < best_q; ++q)
    r.chosen.emplace_back(entries[q].j, entries[q].k);
  return r;
}

SelectionResult select_all(const CoMomentTable& t) {
  SelectionResult r;
  r.gamma = 0.0;
  const auto entries = ranked(t);
  double run = 0.0;
  for (const auto& e : entries) {
    run += e.abs_value * e.abs_value;
    r.pensum_trace.push_back(run);
    r.chosen.emplace_back(e.j, e.k);
  }
  return r;
}

}  // namespace lpcop
