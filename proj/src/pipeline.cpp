#include "lpcop/pipeline.hpp"

#include <cmath>
#include <stdexcept>

namespace lpcop {

double FitConfig::gamma_for(std::size_t n) const {
  return penalty == PenaltyRule::bic ? std::log(static_cast<double>(n)) : 2.0;
}

namespace {

FittedCopula fit_with_bases(LpBasis bx, LpBasis by, const CoMomentTable& com,
                            const FitConfig& cfg) {
  SelectionResult sel =
      cfg.dense ? select_all(com) : select(com, cfg.gamma_for(com.n));
  auto model = MaxEntCopulaModel::fit(com, sel, std::move(bx), std::move(by), cfg.fit);
  return {std::move(model), com, std::move(sel)};
}

}  // namespace

FittedCopula fit_pairs(std::span<const double> xs, std::span<const double> ys,
                       const FitConfig& cfg) {
  if (xs.size() != ys.size() || xs.empty())
    throw std::invalid_argument("paired observations required");
  Marginal mx, my;
  if (cfg.marginals == MarginalsMode::negbin) {
    mx = truncate_parametric(fit_negbin(xs), cfg.truncation_eps);
    my = truncate_parametric(fit_negbin(ys), cfg.truncation_eps);
  } else {
    mx = Marginal::from_samples(xs);
    my = Marginal::from_samples(ys);
  }
  auto bx = LpBasis::build(mx, max_degree_default(mx, cfg.max_order));
  auto by = LpBasis::build(my, max_degree_default(my, cfg.max_order));
  auto com = comoments(bx, by, xs, ys);
  return fit_with_bases(std::move(bx), std::move(by), com, cfg);
}

FittedCopula fit_table(const ContingencyTable& table, const FitConfig& cfg) {
  Marginal mx, my;
  if (cfg.marginals == MarginalsMode::negbin) {
    std::vector<double> xs, ys;
    table.expand_pairs(xs, ys);
    mx = truncate_parametric(fit_negbin(xs), cfg.truncation_eps);
    my = truncate_parametric(fit_negbin(ys), cfg.truncation_eps);
  } else {
    mx = table.row_marginal();
    my = table.col_marginal();
  }
  auto bx = LpBasis::build(mx, max_degree_default(mx, cfg.max_order));
  auto by = LpBasis::build(my, max_degree_default(my, cfg.max_order));
  auto com = comoments(bx, by, table);
  return fit_with_bases(std::move(bx), std::move(by), com, cfg);
}

}  // namespace lpcop
