#include "lpcop/marginal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace lpcop {

namespace {

bool same_atom(double a, double b) {
  if (a == b) return true;
  return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
}

}  // namespace

void Marginal::finalize() {
  if (atoms_.empty()) throw std::invalid_argument("empty sample");
  if (atoms_.size() != probs_.size())
    throw std::invalid_argument("atoms and probs must align");
  double sum = 0.0;
  for (std::size_t k = 0; k < atoms_.size(); ++k) {
    if (!(probs_[k] > 0.0))
      throw std::invalid_argument("marginal probabilities must be strictly positive");
    if (k > 0 && !(atoms_[k] > atoms_[k - 1]))
      throw std::invalid_argument("marginal atoms must be strictly increasing");
    sum += probs_[k];
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("marginal probabilities must sum to 1");
  cdf_.resize(probs_.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < probs_.size(); ++k) {
    acc += probs_[k];
    cdf_[k] = acc;
  }
  cdf_.back() = 1.0;
}

Marginal Marginal::from_samples(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  if (!std::isfinite(sorted.front()) || !std::isfinite(sorted.back()))
    throw std::invalid_argument("sample contains non-finite values");

  Marginal m;
  m.kind_ = MarginalKind::empirical;
  m.sample_size_ = sorted.size();
  const double n = static_cast<double>(sorted.size());
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i + 1;
    while (j < sorted.size() && same_atom(sorted[i], sorted[j])) ++j;
    m.atoms_.push_back(sorted[i]);
    m.probs_.push_back(static_cast<double>(j - i) / n);
    i = j;
  }
  m.finalize();
  return m;
}

Marginal Marginal::from_counts(std::span<const double> atoms,
                               std::span<const double> counts) {
  if (atoms.size() != counts.size())
    throw std::invalid_argument("atoms and counts must align");
  double total = 0.0;
  for (double c : counts) {
    if (!(c >= 0.0) || std::floor(c) != c)
      throw std::invalid_argument("counts must be nonnegative integers");
    total += c;
  }
  if (!(total > 0.0)) throw std::invalid_argument("empty sample");
  Marginal m;
  m.kind_ = MarginalKind::tabulated;
  m.sample_size_ = static_cast<std::size_t>(total);
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    if (counts[k] == 0.0) continue;  // zero-mass atoms are not part of the support
    m.atoms_.push_back(atoms[k]);
    m.probs_.push_back(counts[k] / total);
  }
  m.finalize();
  return m;
}

Marginal Marginal::from_probs(std::vector<double> atoms, std::vector<double> probs,
                              MarginalKind kind, std::string param_name,
                              std::vector<double> params) {
  Marginal m;
  m.atoms_ = std::move(atoms);
  m.probs_ = std::move(probs);
  m.kind_ = kind;
  m.param_name_ = std::move(param_name);
  m.params_ = std::move(params);
  m.finalize();
  return m;
}

double Marginal::mid_distribution(double x) const { return mid_at(index_of(x)); }

std::size_t Marginal::index_of(double x) const {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x);
  if (it != atoms_.end() && same_atom(*it, x))
    return static_cast<std::size_t>(it - atoms_.begin());
  if (it != atoms_.begin() && same_atom(*(it - 1), x))
    return static_cast<std::size_t>(it - 1 - atoms_.begin());
  throw std::invalid_argument("off-support evaluation");
}

bool Marginal::contains(double x) const {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x);
  if (it != atoms_.end() && same_atom(*it, x)) return true;
  return it != atoms_.begin() && same_atom(*(it - 1), x);
}

std::size_t Marginal::nearest_index(double x) const {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x);
  if (it == atoms_.end()) return atoms_.size() - 1;
  if (it == atoms_.begin()) return 0;
  std::size_t hi = static_cast<std::size_t>(it - atoms_.begin());
  // ties snap to the lower atom
  return (x - atoms_[hi - 1] <= atoms_[hi] - x) ? hi - 1 : hi;
}

std::size_t Marginal::cell_of_u(double u) const {
  if (!(u > 0.0) || !(u < 1.0))
    throw std::invalid_argument("u outside (0,1)");
  auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()),
                               atoms_.size() - 1);
}

double Marginal::mean() const {
  double s = 0.0;
  for (std::size_t k = 0; k < atoms_.size(); ++k) s += atoms_[k] * probs_[k];
  return s;
}

double Marginal::variance() const {
  const double m = mean();
  double s = 0.0;
  for (std::size_t k = 0; k < atoms_.size(); ++k) {
    const double d = atoms_[k] - m;
    s += d * d * probs_[k];
  }
  return s;
}

double negbin_log_pmf(double y, const NegBinomialParams& p) {
  return std::lgamma(y + p.phi) - std::lgamma(p.phi) - std::lgamma(y + 1.0) +
         y * std::log(p.mu / (p.mu + p.phi)) +
         p.phi * std::log(p.phi / (p.mu + p.phi));
}

namespace {

// Profile log-likelihood in phi with mu fixed at the sample mean.
struct NbProfile {
  std::vector<double> vals;    // distinct values
  std::vector<double> counts;  // multiplicities
  double n = 0.0;
  double mean = 0.0;
  double sum = 0.0;
  double const_term = 0.0;  // -sum log(y_i!)

  double operator()(double log_phi) const {
    const double phi = std::exp(log_phi);
    double ll = const_term;
    for (std::size_t i = 0; i < vals.size(); ++i)
      ll += counts[i] * std::lgamma(vals[i] + phi);
    ll -= n * std::lgamma(phi);
    ll += sum * std::log(mean / (mean + phi));
    ll += n * phi * std::log(phi / (mean + phi));
    return ll;
  }
};

}  // namespace

NegBinomialParams fit_negbin(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("empty sample");
  NbProfile prof;
  for (double v : values) {
    if (!(v >= 0.0) || std::floor(v) != v)
      throw std::invalid_argument("fit_negbin expects nonnegative integer counts");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i + 1;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    prof.vals.push_back(sorted[i]);
    prof.counts.push_back(static_cast<double>(j - i));
    i = j;
  }
  if (prof.vals.size() < 2)
    throw std::invalid_argument("fit_negbin needs at least two distinct values");
  prof.n = static_cast<double>(sorted.size());
  for (double v : sorted) prof.sum += v;
  prof.mean = prof.sum / prof.n;
  double m2 = 0.0;
  for (double v : sorted) m2 += (v - prof.mean) * (v - prof.mean);
  m2 /= prof.n;
  if (!(m2 > prof.mean))
    throw std::invalid_argument(
        "negative binomial MLE diverges (phi -> infinity): sample variance <= "
        "sample mean; use a Poisson marginal");
  for (std::size_t k = 0; k < prof.vals.size(); ++k)
    prof.const_term -= prof.counts[k] * std::lgamma(prof.vals[k] + 1.0);

  // Golden section on log(phi).
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::log(1e-3), b = std::log(1e6);
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = prof(c), fd = prof(d);
  for (int it = 0; it < 200 && b - a > 1e-12; ++it) {
    if (fc > fd) {
      b = d; d = c; fd = fc;
      c = b - gr * (b - a); fc = prof(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + gr * (b - a); fd = prof(d);
    }
  }
  double t = 0.5 * (a + b);

  // Newton polish on the log scale with central differences.
  const double h = 1e-5;
  for (int it = 0; it < 4; ++it) {
    const double fp = prof(t + h), fm = prof(t - h), f0 = prof(t);
    const double g1 = (fp - fm) / (2.0 * h);
    const double g2 = (fp - 2.0 * f0 + fm) / (h * h);
    if (!(g2 < 0.0)) break;
    const double step = g1 / g2;
    if (!std::isfinite(step) || std::abs(step) > 1.0) break;
    t -= step;
  }
  const double phi = std::exp(t);
  if (phi > 1e5)
    throw std::invalid_argument(
        "negative binomial MLE diverges (phi -> infinity): sample variance <= "
        "sample mean; use a Poisson marginal");
  return {prof.mean, phi};
}

Marginal truncate_parametric(const NegBinomialParams& p, double eps) {
  if (!(eps > 0.0) || !(eps < 1e-4))
    throw std::invalid_argument("truncation eps must lie in (0, 1e-4)");
  if (!(p.mu > 0.0) || !(p.phi > 0.0))
    throw std::invalid_argument("negative binomial parameters must be positive");
  std::vector<double> atoms, probs;
  const double ratio = p.mu / (p.mu + p.phi);
  double pk = std::pow(p.phi / (p.mu + p.phi), p.phi);
  double cum = pk;
  atoms.push_back(0.0);
  probs.push_back(pk);
  std::size_t k = 0;
  while (1.0 - cum >= eps) {
    pk *= (static_cast<double>(k) + p.phi) / (static_cast<double>(k) + 1.0) * ratio;
    ++k;
    atoms.push_back(static_cast<double>(k));
    probs.push_back(pk);
    cum += pk;
  }
  double total = 0.0;
  for (double q : probs) total += q;
  for (double& q : probs) q /= total;
  return Marginal::from_probs(std::move(atoms), std::move(probs),
                              MarginalKind::parametric, "negbin", {p.mu, p.phi});
}

}  // namespace lpcop
