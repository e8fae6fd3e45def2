#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "support.hpp"
#include "tou/ou_core.hpp"

using namespace tou;
using tou::test::rel_err;
using tou::test::throws_kind;

TEST_CASE("parameters and sample paths are validated") {
  CHECK(throws_kind([] { OUParams(0.0, 1.0); }, ErrorKind::InvalidParameter));
  CHECK(throws_kind([] { OUParams(1.0, -1.0); }, ErrorKind::InvalidParameter));
  CHECK(throws_kind([] { SamplePath(0.0, 0.0, {1.0}); }, ErrorKind::InvalidParameter));
  CHECK(throws_kind([] { SamplePath(0.0, 1.0, {}); }, ErrorKind::EmptyInput));
  const SamplePath p(2.0, 0.5, {1, 2, 3, 4, 5});
  CHECK(p.time(3) == 3.5);
  CHECK(p.duration() == 2.0);
}

TEST_CASE("stationary variance") {
  CHECK(stationary_variance(OUParams(0.5, 1.0)) == 1.0);
  CHECK(rel_err(stationary_variance(OUParams(1.0, std::sqrt(2.0))), 1.0) < 1e-15);
  CHECK(rel_err(stationary_variance(OUParams(0.05, 1.0)), 10.0) < 1e-15);
}

TEST_CASE("transition law") {
  const OUParams any(0.3, 1.7);
  const auto zero = transition_law(any, 0.0, 3.0);
  CHECK(zero.mean == 3.0);
  CHECK(zero.variance == 0.0);

  const auto half = transition_law(OUParams(1.0, std::sqrt(2.0)), std::log(2.0), 1.0);
  CHECK(rel_err(half.mean, 0.5) < 1e-15);
  CHECK(rel_err(half.variance, 0.75) < 1e-15);

  const auto relaxed = transition_law(OUParams(0.05, 1.0), 2000.0, 7.0);
  CHECK(std::abs(relaxed.mean) < 1e-40);
  CHECK(rel_err(relaxed.variance, 10.0) < 1e-15);

  CHECK(throws_kind([&] { (void)transition_law(any, -1.0, 0.0); }, ErrorKind::Domain));
}

TEST_CASE("transition law composes as a semigroup") {
  for (double alpha : {0.01, 0.05, 1.0, 3.0}) {
    const OUParams p(alpha, 0.8);
    for (double u : {0.1, 1.0, 7.5}) {
      for (double v : {0.2, 2.0, 13.0}) {
        const double z = -1.3;
        const auto first = transition_law(p, u, z);
        const auto second = transition_law(p, v, first.mean);
        const auto both = transition_law(p, u + v, z);
        CHECK(rel_err(second.mean, both.mean) < 1e-12);
        const double decay = std::exp(-2.0 * alpha * v);
        CHECK(rel_err(second.variance + decay * first.variance, both.variance) < 1e-12);
        CHECK(first.variance <= stationary_variance(p));
      }
    }
  }
}

TEST_CASE("autocorrelation") {
  const OUParams p(0.05, 1.0);
  CHECK(autocorrelation(p, 0.0) == 1.0);
  CHECK(rel_err(autocorrelation(p, 20.0), 0.367879441171442322) < 1e-15);
  CHECK(autocorrelation(p, -13.0) == autocorrelation(p, 13.0));
}

TEST_CASE("increment correlation") {
  const OUParams p(0.05, 1.0);
  CHECK(increment_correlation(p, 20.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rel_err(increment_correlation(p, 20.0, 20.0), -0.316060279414278839) < 1e-13);
  CHECK(rel_err(increment_correlation(p, 20.0, 7.0), 0.496811987253264226) < 1e-13);
  const double far = increment_correlation(p, 20.0, 400.0);
  CHECK(far < 0.0);
  CHECK(far > -1e-8);
  // continuous across k = delta
  CHECK(std::abs(increment_correlation(p, 20.0, 20.0 - 1e-9) - increment_correlation(p, 20.0, 20.0 + 1e-9)) < 1e-9);
  CHECK(throws_kind([&] { (void)increment_correlation(p, 0.0, 1.0); }, ErrorKind::Domain));
}

TEST_CASE("exact simulation is reproducible") {
  const OUParams p(0.05, 1.0);
  const auto a = simulate_stationary(p, 5000, 1.0, {11, 2});
  const auto b = simulate_stationary(p, 5000, 1.0, {11, 2});
  const auto c = simulate_stationary(p, 5000, 1.0, {11, 3});
  CHECK(a.values() == b.values());
  CHECK(a.values() != c.values());
  const auto from = simulate_from(p, 4.0, 10, 1.0, {1, 1});
  CHECK(from.values().front() == 4.0);
  CHECK(from.size() == 10);
}

TEST_CASE("stationary simulation matches variance and autocorrelation") {
  const OUParams p(0.05, 1.0);
  const std::size_t n = 1000000;
  const auto path = simulate_stationary(p, n, 1.0, {2024, 0});
  const auto& x = path.values();
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  double var = 0.0, cov = 0.0;
  for (std::size_t i = 0; i < n; ++i) var += (x[i] - mean) * (x[i] - mean);
  for (std::size_t i = 0; i + 20 < n; ++i) cov += (x[i] - mean) * (x[i + 20] - mean);
  var /= static_cast<double>(n - 1);
  cov /= static_cast<double>(n - 20);
  // AR(1) with phi = e^{-0.05}: the sample variance has standard error
  // sigma² sqrt(2 (1 + phi²) / (n (1 - phi²))).
  const double phi = std::exp(-0.05);
  const double se = 10.0 * std::sqrt(2.0 * (1 + phi * phi) / (static_cast<double>(n) * (1 - phi * phi)));
  CHECK(std::abs(var - 10.0) < 3.0 * se);
  CHECK(std::abs(cov / var - std::exp(-1.0)) < 0.02);
}
