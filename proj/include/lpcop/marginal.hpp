#pragma once

#include <span>
#include <string>
#include <vector>

namespace lpcop {

enum class MarginalKind { empirical, tabulated, parametric };

// One-dimensional discrete marginal: ordered support atoms with strictly
// positive masses summing to one. Every integral downstream is a finite
// weighted sum over this support, so there is no quadrature error anywhere.
class Marginal {
public:
  Marginal() = default;  // empty placeholder; assign before use

  // Pools tied values into atoms (exact equality for integers, 1e-12
  // relative tolerance for reals) and assigns relative frequencies.
  static Marginal from_samples(std::span<const double> values);

  // Tabulated marginal from atom values and nonnegative counts.
  static Marginal from_counts(std::span<const double> atoms,
                              std::span<const double> counts);

  // Direct construction (deserialization, parametric truncation).
  static Marginal from_probs(std::vector<double> atoms, std::vector<double> probs,
                             MarginalKind kind, std::string param_name = {},
                             std::vector<double> params = {});

  std::size_t size() const { return atoms_.size(); }
  const std::vector<double>& atoms() const { return atoms_; }
  const std::vector<double>& probs() const { return probs_; }

  // Right-closed cdf F(atom_k) and the mid-distribution value F(x) - p(x)/2.
  double cdf_at(std::size_t k) const { return cdf_[k]; }
  double mid_at(std::size_t k) const { return cdf_[k] - 0.5 * probs_[k]; }

  // Mid-distribution transform at a support value; throws off support.
  double mid_distribution(double x) const;

  std::size_t index_of(double x) const;
  bool contains(double x) const;
  std::size_t nearest_index(double x) const;

  // Index of the probability cell containing u in (0,1): the smallest k
  // with F(atom_k) >= u.
  std::size_t cell_of_u(double u) const;

  double mean() const;
  double variance() const;

  MarginalKind kind() const { return kind_; }
  const std::string& param_name() const { return param_name_; }
  const std::vector<double>& params() const { return params_; }
  std::size_t sample_size() const { return sample_size_; }

private:
  void finalize();

  std::vector<double> atoms_;
  std::vector<double> probs_;
  std::vector<double> cdf_;
  MarginalKind kind_ = MarginalKind::empirical;
  std::string param_name_;
  std::vector<double> params_;
  std::size_t sample_size_ = 0;  // n for empirical/tabulated kinds
};

struct NegBinomialParams {
  double mu;   // mean
  double phi;  // dispersion; variance = mu + mu^2/phi
};

// log NB(y; mu, phi) for integer y >= 0.
double negbin_log_pmf(double y, const NegBinomialParams& p);

// Maximum likelihood fit for nonnegative integer counts. mu at fixed phi is
// the sample mean; phi maximizes the profile likelihood on a log-scale
// bracket [1e-3, 1e6] by golden section with a Newton polish. Underdispersed
// data has no finite maximizer and throws.
NegBinomialParams fit_negbin(std::span<const double> values);

// Finite marginal on 0..K where K is the smallest integer with upper tail
// mass < eps; probabilities renormalized to sum to one.
Marginal truncate_parametric(const NegBinomialParams& p, double eps = 1e-8);

}  // namespace lpcop
