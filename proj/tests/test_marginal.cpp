#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "lpcop/marginal.hpp"
#include "test_support.hpp"

using lpcop::Marginal;

TEST_CASE("from_samples pools ties and counts frequencies") {
  const std::vector<double> v{1, 1, 2, 3};
  const auto m = Marginal::from_samples(v);
  REQUIRE(m.size() == 3);
  CHECK(m.atoms() == std::vector<double>{1, 2, 3});
  CHECK(m.probs()[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(m.probs()[1] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(m.probs()[2] == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("from_samples degenerate single value") {
  const std::vector<double> v{5};
  const auto m = Marginal::from_samples(v);
  REQUIRE(m.size() == 1);
  CHECK(m.atoms()[0] == 5.0);
  CHECK(m.probs()[0] == 1.0);
}

TEST_CASE("from_samples rejects empty input") {
  CHECK_THROWS_WITH_AS(Marginal::from_samples({}), "empty sample",
                       std::invalid_argument);
}

TEST_CASE("from_samples is permutation invariant") {
  testsup::Rng rng(11);
  std::vector<double> v;
  for (int i = 0; i < 60; ++i) v.push_back(std::floor(rng.uniform(0, 8)));
  auto shuffled = v;
  for (std::size_t i = shuffled.size() - 1; i > 0; --i)
    std::swap(shuffled[i], shuffled[rng.index(i + 1)]);
  const auto a = Marginal::from_samples(v);
  const auto b = Marginal::from_samples(shuffled);
  CHECK(a.atoms() == b.atoms());
  CHECK(a.probs() == b.probs());
}

TEST_CASE("shunter first-period marginal from expanded samples") {
  // row sums of the bundled table: 50, 43, 17, 9, 2, 1 over atoms 0,1,2,3,4,7
  std::vector<double> xs;
  const std::vector<std::pair<double, int>> rows{{0, 50}, {1, 43}, {2, 17},
                                                 {3, 9},  {4, 2},  {7, 1}};
  for (const auto& [v, c] : rows)
    for (int i = 0; i < c; ++i) xs.push_back(v);
  const auto m = Marginal::from_samples(xs);
  REQUIRE(m.size() == 6);
  CHECK(m.atoms() == std::vector<double>{0, 1, 2, 3, 4, 7});
  for (std::size_t k = 0; k < 6; ++k)
    CHECK(m.probs()[k] == doctest::Approx(rows[k].second / 122.0).epsilon(1e-15));
}

TEST_CASE("near-equal reals pool into one atom") {
  const double x = 1.0;
  const std::vector<double> v{x, x * (1.0 + 5e-13), 2.0};
  const auto m = Marginal::from_samples(v);
  CHECK(m.size() == 2);
}

TEST_CASE("mid-distribution values") {
  SUBCASE("Bernoulli(0.5)") {
    const auto m = Marginal::from_counts(std::vector<double>{0, 1},
                                         std::vector<double>{1, 1});
    CHECK(m.mid_distribution(0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(m.mid_distribution(1) == doctest::Approx(0.75).epsilon(1e-15));
  }
  SUBCASE("uniform over four atoms") {
    const auto m = Marginal::from_counts(std::vector<double>{1, 2, 3, 4},
                                         std::vector<double>{1, 1, 1, 1});
    CHECK(m.mid_distribution(2) == doctest::Approx(0.375).epsilon(1e-15));
  }
  SUBCASE("off support throws") {
    const auto m = Marginal::from_samples(std::vector<double>{0, 1});
    CHECK_THROWS_WITH_AS(m.mid_distribution(0.5), "off-support evaluation",
                         std::invalid_argument);
  }
}

TEST_CASE("mid-distribution moments under the marginal's own measure") {
  testsup::Rng rng(42);
  for (int rep = 0; rep < 25; ++rep) {
    const auto m = testsup::random_marginal(rng, 2 + rng.index(20));
    double mean = 0.0, var = 0.0, p3 = 0.0, prev = -1.0;
    for (std::size_t k = 0; k < m.size(); ++k) {
      const double f = m.mid_at(k);
      CHECK(f > prev);  // strictly increasing
      prev = f;
      mean += m.probs()[k] * f;
      p3 += std::pow(m.probs()[k], 3);
    }
    CHECK(mean == doctest::Approx(0.5).epsilon(1e-12));
    for (std::size_t k = 0; k < m.size(); ++k)
      var += m.probs()[k] * (m.mid_at(k) - 0.5) * (m.mid_at(k) - 0.5);
    CHECK(var == doctest::Approx((1.0 - p3) / 12.0).epsilon(1e-10));
  }
}

TEST_CASE("negative binomial MLE") {
  SUBCASE("recovers parameters from expected counts of NB(2,5)") {
    const lpcop::NegBinomialParams truth{2.0, 5.0};
    const auto g = lpcop::truncate_parametric(truth, 1e-8);
    std::vector<double> sample;
    const double n = 200000;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const auto c = static_cast<std::size_t>(std::llround(g.probs()[k] * n));
      for (std::size_t r = 0; r < c; ++r) sample.push_back(g.atoms()[k]);
    }
    const auto fit = lpcop::fit_negbin(sample);
    CHECK(fit.mu == doctest::Approx(2.0).epsilon(0.01));
    CHECK(fit.phi == doctest::Approx(5.0).epsilon(0.01));
  }
  SUBCASE("underdispersed data diverges") {
    const std::vector<double> v{1, 1, 1, 2, 2, 2, 1, 2};  // variance < mean
    CHECK_THROWS_AS(lpcop::fit_negbin(v), std::invalid_argument);
  }
  SUBCASE("non-integer input rejected") {
    CHECK_THROWS_AS(lpcop::fit_negbin(std::vector<double>{0.5, 1.0, 2.0}),
                    std::invalid_argument);
  }
}

TEST_CASE("parametric truncation") {
  const lpcop::NegBinomialParams p{0.97, 3.60};
  const auto m = lpcop::truncate_parametric(p, 1e-8);
  SUBCASE("mean matches within the tail bound") {
    CHECK(m.mean() == doctest::Approx(0.97).epsilon(1e-6));
  }
  SUBCASE("probabilities renormalized exactly") {
    double s = 0.0;
    for (double q : m.probs()) s += q;
    CHECK(std::abs(s - 1.0) < 1e-15);
  }
  SUBCASE("small-mean pmf at zero") {
    const lpcop::NegBinomialParams tiny{0.01, 2.0};
    const auto t = lpcop::truncate_parametric(tiny, 1e-8);
    CHECK(t.probs()[0] ==
          doctest::Approx(std::pow(2.0 / 2.01, 2.0)).epsilon(1e-7));
    CHECK(t.size() < 12);
  }
  SUBCASE("variance matches mu + mu^2/phi") {
    CHECK(m.variance() == doctest::Approx(0.97 + 0.97 * 0.97 / 3.60).epsilon(1e-5));
  }
  SUBCASE("eps must be small and positive") {
    CHECK_THROWS_AS(lpcop::truncate_parametric(p, 1e-3), std::invalid_argument);
    CHECK_THROWS_AS(lpcop::truncate_parametric(p, 0.0), std::invalid_argument);
  }
}
