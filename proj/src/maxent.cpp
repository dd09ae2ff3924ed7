#include "lpcop/maxent.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

namespace lpcop {

FitNonConvergence::FitNonConvergence(double grad_norm_, int iterations_)
    : std::runtime_error("maxent fit did not converge in " +
                         std::to_string(iterations_) +
                         " iterations (gradient max-norm " +
                         std::to_string(grad_norm_) + ")"),
      grad_norm(grad_norm_),
      iterations(iterations_) {}

namespace {

kernels::ProductStatGrid make_grid(const LpBasis& bx, const LpBasis& by,
                                   std::span<const std::pair<int, int>> indices) {
  kernels::ProductStatGrid g;
  g.px = bx.marginal().probs();
  g.qy = by.marginal().probs();
  g.xrow.reserve(indices.size());
  g.yrow.reserve(indices.size());
  for (const auto& [j, k] : indices) {
    g.xrow.push_back(bx.row(j).data());
    g.yrow.push_back(by.row(k).data());
  }
  return g;
}

}  // namespace

double log_partition(const LpBasis& bx, const LpBasis& by,
                     std::span<const std::pair<int, int>> indices,
                     std::span<const double> theta) {
  return kernels::log_partition(make_grid(bx, by, indices), theta);
}

MaxEntCopulaModel MaxEntCopulaModel::fit(const CoMomentTable& t,
                                         const SelectionResult& sel, LpBasis bx,
                                         LpBasis by, const FitOptions& opt) {
  MaxEntCopulaModel m(std::move(bx), std::move(by));
  m.indices_ = sel.chosen;
  const std::size_t p = sel.chosen.size();
  m.theta_.assign(p, 0.0);
  m.comeans_.reserve(p);
  for (const auto& [j, k] : sel.chosen) m.comeans_.push_back(t.at(j, k));
  if (p == 0) {
    m.log_z_ = 0.0;  // uniform copula
    return m;
  }

  const auto grid = make_grid(m.bx_, m.by_, m.indices_);
  Eigen::Map<const Eigen::VectorXd> target(m.comeans_.data(), static_cast<long>(p));
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(static_cast<long>(p));

  for (int it = 1; it <= opt.max_iter; ++it) {
    const auto mom = kernels::moments(grid, {theta.data(), p}, true);
    Eigen::Map<const Eigen::VectorXd> mean(mom.mean.data(), static_cast<long>(p));
    const Eigen::VectorXd grad = mean - target;
    const double gnorm = grad.lpNorm<Eigen::Infinity>();
    m.report_.iterations = it;
    m.report_.grad_norm = gnorm;
    if (gnorm < opt.tol) {
      std::copy(theta.data(), theta.data() + p, m.theta_.begin());
      m.log_z_ = mom.log_z;
      return m;
    }

    Eigen::Map<const Eigen::MatrixXd> hess(mom.cov.data(), static_cast<long>(p),
                                           static_cast<long>(p));
    Eigen::VectorXd dir = hess.ldlt().solve(grad);
    bool newton_ok = dir.allFinite() && grad.dot(dir) > 0.0;
    if (!newton_ok) {
      // regularize, then give up on curvature if still unusable
      Eigen::MatrixXd reg = hess;
      reg.diagonal().array() += 1e-10 * hess.trace();
      dir = reg.ldlt().solve(grad);
      newton_ok = dir.allFinite() && grad.dot(dir) > 0.0;
      if (!newton_ok) {
        dir = grad;
        m.report_.gradient_fallback = true;
      }
    }

    // Armijo backtracking on f(theta) = log Z - <theta, target>; the noise
    // cushion keeps full Newton steps acceptable once the true decrease
    // drops below double rounding
    const double f0 = mom.log_z - theta.dot(target);
    const double slope = grad.dot(dir);
    const double noise = 1e-15 * (1.0 + std::abs(f0));
    double step = 1.0;
    Eigen::VectorXd trial = theta - step * dir;
    while (step > 1e-14) {
      trial = theta - step * dir;
      const double f1 =
          kernels::log_partition(grid, {trial.data(), p}) - trial.dot(target);
      if (f1 <= f0 - 1e-4 * step * slope + noise) break;
      step *= 0.5;
    }
    theta = trial;
  }
  throw FitNonConvergence(m.report_.grad_norm, opt.max_iter);
}

MaxEntCopulaModel MaxEntCopulaModel::from_parameters(
    LpBasis bx, LpBasis by, std::vector<std::pair<int, int>> indices,
    std::vector<double> theta) {
  MaxEntCopulaModel m(std::move(bx), std::move(by));
  m.indices_ = std::move(indices);
  m.theta_ = std::move(theta);
  if (m.indices_.size() != m.theta_.size())
    throw std::invalid_argument("indices and theta must align");
  m.log_z_ = kernels::log_partition(make_grid(m.bx_, m.by_, m.indices_), m.theta_);
  m.comeans_ = m.model_comeans();
  return m;
}

MaxEntCopulaModel MaxEntCopulaModel::from_stored(
    LpBasis bx, LpBasis by, std::vector<std::pair<int, int>> indices,
    std::vector<double> theta, double log_z) {
  MaxEntCopulaModel m(std::move(bx), std::move(by));
  m.indices_ = std::move(indices);
  m.theta_ = std::move(theta);
  if (m.indices_.size() != m.theta_.size())
    throw std::invalid_argument("indices and theta must align");
  m.log_z_ = log_z;
  return m;
}

double MaxEntCopulaModel::exponent_cell(std::size_t k, std::size_t l) const {
  double eta = 0.0;
  for (std::size_t t = 0; t < theta_.size(); ++t)
    eta += theta_[t] * bx_.at(indices_[t].first, k) * by_.at(indices_[t].second, l);
  return eta;
}

double MaxEntCopulaModel::density_cell(std::size_t k, std::size_t l) const {
  return std::exp(exponent_cell(k, l) - log_z_);
}

double MaxEntCopulaModel::density(double u, double v) const {
  return density_cell(bx_.marginal().cell_of_u(u), by_.marginal().cell_of_u(v));
}

std::vector<double> MaxEntCopulaModel::model_comeans() const {
  return kernels::moments(stat_grid(), theta_, false).mean;
}

kernels::ProductStatGrid MaxEntCopulaModel::stat_grid() const {
  return make_grid(bx_, by_, indices_);
}

double CcdSlice::evaluate_raw(double atom) const {
  double eta = raw_constant;
  const std::size_t k = basis.marginal().index_of(atom);
  for (std::size_t j = 0; j < coefficients.size(); ++j)
    eta += coefficients[j] * basis.at(static_cast<int>(j) + 1, k);
  return std::exp(eta);
}

double CcdSlice::evaluate(double atom) const {
  double eta = normalized_constant;
  const std::size_t k = basis.marginal().index_of(atom);
  for (std::size_t j = 0; j < coefficients.size(); ++j)
    eta += coefficients[j] * basis.at(static_cast<int>(j) + 1, k);
  return std::exp(eta);
}

CcdSlice MaxEntCopulaModel::ccd_slice(CcdSide side, double condition_atom) const {
  const bool cond_on_y = (side == CcdSide::x_given_y);
  const LpBasis& cond = cond_on_y ? by_ : bx_;
  const LpBasis& free = cond_on_y ? bx_ : by_;
  const std::size_t ci = cond.marginal().index_of(condition_atom);

  CcdSlice s;
  s.side = side;
  s.condition_atom = condition_atom;
  s.basis = free;
  s.coefficients.assign(static_cast<std::size_t>(free.degree()), 0.0);
  for (std::size_t t = 0; t < theta_.size(); ++t) {
    const int jf = cond_on_y ? indices_[t].first : indices_[t].second;
    const int jc = cond_on_y ? indices_[t].second : indices_[t].first;
    s.coefficients[static_cast<std::size_t>(jf - 1)] += theta_[t] * cond.at(jc, ci);
  }
  s.raw_constant = -log_z_;

  const auto& probs = free.marginal().probs();
  double shift = 0.0;
  std::vector<double> eta(probs.size(), 0.0);
  for (std::size_t k = 0; k < probs.size(); ++k) {
    for (std::size_t j = 0; j < s.coefficients.size(); ++j)
      eta[k] += s.coefficients[j] * free.at(static_cast<int>(j) + 1, k);
    shift = std::max(shift, eta[k]);
  }
  double norm = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k)
    norm += probs[k] * std::exp(eta[k] - shift);
  s.normalized_constant = -(shift + std::log(norm));
  return s;
}

std::vector<double> MaxEntCopulaModel::smooth_cells(const ContingencyTable& table) const {
  const auto& mx = bx_.marginal();
  const auto& my = by_.marginal();
  // rows/columns outside the model support get probability zero when their
  // margin is empty; a populated off-support label is a genuine mismatch
  constexpr std::size_t kOff = static_cast<std::size_t>(-1);
  std::vector<std::size_t> xi(table.rows(), kOff), yi(table.cols(), kOff);
  for (std::size_t k = 0; k < table.rows(); ++k) {
    if (mx.contains(table.row_values()[k]))
      xi[k] = mx.index_of(table.row_values()[k]);
    else if (table.row_margin(k) > 0.0)
      throw std::invalid_argument("table does not match model support");
  }
  for (std::size_t l = 0; l < table.cols(); ++l) {
    if (my.contains(table.col_values()[l]))
      yi[l] = my.index_of(table.col_values()[l]);
    else if (table.col_margin(l) > 0.0)
      throw std::invalid_argument("table does not match model support");
  }
  std::vector<double> out(table.rows() * table.cols(), 0.0);
  for (std::size_t k = 0; k < table.rows(); ++k)
    for (std::size_t l = 0; l < table.cols(); ++l)
      if (xi[k] != kOff && yi[l] != kOff)
        out[k * table.cols() + l] =
            mx.probs()[xi[k]] * my.probs()[yi[l]] * density_cell(xi[k], yi[l]);
  return out;
}

}  // namespace lpcop
