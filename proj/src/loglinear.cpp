#include "lpcop/loglinear.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace lpcop {

namespace {

// Spectral scores from an SVD of the coefficient matrix: component c of the
// row scores is sum_j U(j,c) T_{j+1}(x_k), and likewise for columns.
LogLinearModel spectral_from_matrix(const Eigen::MatrixXd& coef, const LpBasis& bx,
                                    const LpBasis& by, double mu0) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(coef,
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  LogLinearModel m;
  m.mu0 = mu0;
  for (long c = 0; c < sv.size(); ++c) {
    if (!(sv[c] >= 1e-12)) break;  // descending; drop negligible components
    Eigen::VectorXd u = svd.matrixU().col(c);
    Eigen::VectorXd v = svd.matrixV().col(c);
    for (long j = 0; j < u.size(); ++j) {
      if (u[j] != 0.0) {
        if (u[j] < 0.0) {
          u = -u;
          v = -v;
        }
        break;
      }
    }
    std::vector<double> phi(bx.support_size(), 0.0);
    std::vector<double> psi(by.support_size(), 0.0);
    for (std::size_t k = 0; k < phi.size(); ++k)
      for (long j = 0; j < u.size(); ++j)
        phi[k] += u[j] * bx.at(static_cast<int>(j) + 1, k);
    for (std::size_t l = 0; l < psi.size(); ++l)
      for (long j = 0; j < v.size(); ++j)
        psi[l] += v[j] * by.at(static_cast<int>(j) + 1, l);
    m.mu.push_back(sv[c]);
    m.row_scores.push_back(std::move(phi));
    m.col_scores.push_back(std::move(psi));
  }
  return m;
}

}  // namespace

LogLinearModel to_loglinear(const MaxEntCopulaModel& m) {
  const int m1 = m.basis_x().degree(), m2 = m.basis_y().degree();
  Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(m1, m2);
  for (std::size_t t = 0; t < m.indices().size(); ++t)
    theta(m.indices()[t].first - 1, m.indices()[t].second - 1) = m.theta()[t];
  return spectral_from_matrix(theta, m.basis_x(), m.basis_y(), -m.log_z());
}

LogLinearModel saturated_plugin(const ContingencyTable& t) {
  if (!t.strictly_positive())
    throw std::invalid_argument(
        "plug-in intrinsic association undefined on sparse table; use "
        "to_loglinear on the MaxEnt fit");
  const Marginal mx = t.row_marginal(), my = t.col_marginal();
  const auto bx = LpBasis::build(mx, static_cast<int>(mx.size()) - 1);
  const auto by = LpBasis::build(my, static_cast<int>(my.size()) - 1);

  // weighted projection of log p~ onto the LP product basis; main effects
  // drop out because the T_j have zero weighted mean
  Eigen::MatrixXd coef = Eigen::MatrixXd::Zero(bx.degree(), by.degree());
  double mu0 = 0.0;
  for (std::size_t k = 0; k < t.rows(); ++k)
    for (std::size_t l = 0; l < t.cols(); ++l) {
      const double w = (t.row_margin(k) / t.n()) * (t.col_margin(l) / t.n());
      const double logp = std::log(t.count(k, l) / t.n());
      mu0 += w * (logp - std::log(t.row_margin(k) / t.n()) -
                  std::log(t.col_margin(l) / t.n()));
      for (int j = 1; j <= bx.degree(); ++j)
        for (int c = 1; c <= by.degree(); ++c)
          coef(j - 1, c - 1) += w * logp * bx.at(j, k) * by.at(c, l);
    }
  return spectral_from_matrix(coef, bx, by, mu0);
}

std::vector<double> intrinsic_association(const ContingencyTable& t,
                                          const LogLinearModel& scores) {
  if (!t.strictly_positive())
    throw std::invalid_argument(
        "plug-in intrinsic association undefined on sparse table; use "
        "to_loglinear on the MaxEnt fit");
  if (scores.n_rows() != t.rows() || scores.n_cols() != t.cols())
    throw std::invalid_argument("scores do not match table dimensions");
  std::vector<double> mu(static_cast<std::size_t>(scores.components()), 0.0);
  for (std::size_t k = 0; k < t.rows(); ++k)
    for (std::size_t l = 0; l < t.cols(); ++l) {
      const double w = (t.row_margin(k) / t.n()) * (t.col_margin(l) / t.n()) *
                       std::log(t.count(k, l) / t.n());
      for (int c = 0; c < scores.components(); ++c)
        mu[static_cast<std::size_t>(c)] +=
            w * scores.row_scores[static_cast<std::size_t>(c)][k] *
            scores.col_scores[static_cast<std::size_t>(c)][l];
    }
  return mu;
}

double log_odds_ratio(const LogLinearModel& m, std::size_t k, std::size_t k2,
                      std::size_t l, std::size_t l2) {
  if (k >= m.n_rows() || k2 >= m.n_rows() || l >= m.n_cols() || l2 >= m.n_cols())
    throw std::out_of_range("log_odds_ratio index out of range");
  double s = 0.0;
  for (int c = 0; c < m.components(); ++c) {
    const auto& phi = m.row_scores[static_cast<std::size_t>(c)];
    const auto& psi = m.col_scores[static_cast<std::size_t>(c)];
    s += m.mu[static_cast<std::size_t>(c)] * (phi[k] - phi[k2]) * (psi[l] - psi[l2]);
  }
  return s;
}

BiplotPoints biplot_coordinates(const LogLinearModel& m) {
  BiplotPoints out;
  const std::size_t nr = m.n_rows(), nc = m.n_cols();
  out.row_points.resize(nr, {0.0, 0.0});
  out.col_points.resize(nc, {0.0, 0.0});
  for (int axis = 0; axis < 2 && axis < m.components(); ++axis) {
    for (std::size_t k = 0; k < nr; ++k)
      out.row_points[k][static_cast<std::size_t>(axis)] =
          m.mu[static_cast<std::size_t>(axis)] *
          m.row_scores[static_cast<std::size_t>(axis)][k];
    for (std::size_t l = 0; l < nc; ++l)
      out.col_points[l][static_cast<std::size_t>(axis)] =
          m.mu[static_cast<std::size_t>(axis)] *
          m.col_scores[static_cast<std::size_t>(axis)][l];
  }
  return out;
}

LogLinearModel loglinear_analysis(const ContingencyTable& t, const FitConfig& cfg) {
  const auto fitted = fit_table(t, cfg);
  LogLinearModel m = to_loglinear(fitted.model);
  if (t.strictly_positive() && m.components() > 0) {
    m.mu = intrinsic_association(t, m);
    double mu0 = 0.0;
    for (std::size_t k = 0; k < t.rows(); ++k)
      for (std::size_t l = 0; l < t.cols(); ++l) {
        const double pk = t.row_margin(k) / t.n(), ql = t.col_margin(l) / t.n();
        mu0 += pk * ql * std::log(t.count(k, l) / t.n() / (pk * ql));
      }
    m.mu0 = mu0;
  }
  return m;
}

}  // namespace lpcop
