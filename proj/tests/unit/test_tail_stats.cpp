#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "support.hpp"
#include "tou/rng.hpp"
#include "tou/tail_stats.hpp"

using namespace tou;
using tou::test::rel_err;
using tou::test::throws_kind;

namespace {

std::vector<double> pareto(double beta, std::size_t n, std::uint64_t seed) {
  Rng rng(seed, 0);
  std::vector<double> v(n);
  for (auto& x : v) x = std::pow(rng.uniform(), -1.0 / beta);
  return v;
}

}  // namespace

TEST_CASE("hill estimator by hand") {
  const double e = std::numbers::e;
  const std::vector<double> data = {e * e, e, 1.0};
  const auto est = hill_estimator_k(data, Side::Right, 3);
  CHECK(rel_err(est.index, 2.0 / 3.0) < 1e-15);
  CHECK(est.k_used == 3);
  CHECK(est.method == TailMethod::Hill);

  std::vector<double> scaled = data;
  for (auto& v : scaled) v *= 17.5;
  CHECK(rel_err(hill_estimator_k(scaled, Side::Right, 3).index, est.index) < 1e-14);

  std::vector<double> negated = data;
  for (auto& v : negated) v = -v;
  CHECK(hill_estimator_k(negated, Side::Left, 3).index == est.index);
}

TEST_CASE("hill estimator threshold selection and errors") {
  const auto v = pareto(2.0, 1000, 5);
  CHECK(hill_estimator(v, Side::Right, 5.0).k_used == 50);
  CHECK(hill_estimator(v, Side::Right, 0.01).k_used == 2);
  CHECK(rel_err(hill_estimator(v, Side::Right, 5.0).fraction_pct, 5.0) < 1e-15);
  CHECK(throws_kind([&] { (void)hill_estimator_k(v, Side::Right, 1); }, ErrorKind::InsufficientData));
  CHECK(throws_kind([&] { (void)hill_estimator_k(v, Side::Right, 1001); }, ErrorKind::InsufficientData));
  const std::vector<double> crossing = {3.0, 2.0, -1.0};
  CHECK(throws_kind([&] { (void)hill_estimator_k(crossing, Side::Right, 3); }, ErrorKind::NonpositiveThreshold));
  const std::vector<double> flat = {2.0, 2.0, 2.0, 2.0};
  CHECK(throws_kind([&] { (void)hill_estimator_k(flat, Side::Right, 3); }, ErrorKind::InsufficientData));
  CHECK(throws_kind([&] { (void)hill_estimator(v, Side::Right, 0.0); }, ErrorKind::Domain));
}

TEST_CASE("hill estimator on pareto data") {
  const auto v = pareto(2.5, 1000000, 11);
  const auto est = hill_estimator(v, Side::Right, 2.0);
  CHECK(est.k_used == 20000);
  CHECK(std::abs(est.index - 2.5) < 3.0 * 2.5 / std::sqrt(20000.0));
}

TEST_CASE("least squares line") {
  const std::vector<double> x = {0.0, 1.0};
  const std::vector<double> y = {1.0, 3.0};
  const auto fit = least_squares_line(x, y);
  CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(fit.intercept == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-15));
  const std::vector<double> same = {2.0, 2.0, 2.0};
  const std::vector<double> any = {1.0, 2.0, 3.0};
  CHECK(throws_kind([&] { (void)least_squares_line(same, any); }, ErrorKind::SingularFit));
}

TEST_CASE("log-log fit") {
  const std::size_t n = 2000;
  const double beta = 1.7;
  std::vector<double> exact(n);
  for (std::size_t i = 0; i < n; ++i) exact[i] = std::pow(static_cast<double>(i + 1) / n, -1.0 / beta);
  const auto fit = loglog_tail_fit(exact, Side::Right, 0.05);
  CHECK(fit.k_used == 100);
  CHECK(std::abs(fit.index - beta) < 1e-10);
  CHECK(*fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));

  const std::vector<double> two = {4.0, 2.0, 1.0, 0.5};
  CHECK(rel_err(loglog_tail_fit(two, Side::Right, 0.5, 2).index, 1.0) < 1e-14);
  CHECK(throws_kind([&] { (void)loglog_tail_fit(two, Side::Right, 0.5); }, ErrorKind::InsufficientData));
  const std::vector<double> ties(100, 3.0);
  CHECK(throws_kind([&] { (void)loglog_tail_fit(ties, Side::Right, 0.2); }, ErrorKind::SingularFit));

  const auto v = pareto(2.5, 1000000, 12);
  CHECK(rel_err(loglog_tail_fit(v, Side::Right, 0.05).index, 2.5) < 0.10);
}

TEST_CASE("hill and log-log agree on pareto data") {
  const auto v = pareto(2.5, 1000000, 13);
  for (double f : {0.02, 0.03, 0.05}) {
    const double hill = hill_estimator(v, Side::Right, 100.0 * f).index;
    const double ls = loglog_tail_fit(v, Side::Right, f).index;
    CHECK(std::abs(hill - ls) <= 0.15 * hill);
  }
}

TEST_CASE("empirical tail") {
  const std::vector<double> data = {1.0, 2.0, 3.0};
  CHECK(empirical_tail(data, 1.5, Side::Right) == doctest::Approx(2.0 / 3.0));
  CHECK(empirical_tail(data, 0.0, Side::Right) == 1.0);
  CHECK(empirical_tail(data, 3.0, Side::Right) == 0.0);
  const std::vector<double> neg = {-1.0, -2.0, -3.0};
  CHECK(empirical_tail(neg, 1.5, Side::Left) == doctest::Approx(2.0 / 3.0));
  CHECK(throws_kind([] { (void)empirical_tail({}, 0.0, Side::Right); }, ErrorKind::EmptyInput));
}

TEST_CASE("tail plot points") {
  const std::vector<double> data = {0.5, -1.0, 4.0, 2.0};
  const auto pts = tail_plot_points(data, Side::Right);
  REQUIRE(pts.size() == 3);
  CHECK(pts[0].ln_value == std::log(4.0));
  CHECK(pts[0].ln_tail_prob == std::log(0.25));
  CHECK(pts[2].ln_value == std::log(0.5));
  const auto left = tail_plot_points(data, Side::Left);
  REQUIRE(left.size() == 1);
  CHECK(left[0].ln_value == 0.0);
}

TEST_CASE("estimates serialize") {
  const auto v = pareto(2.0, 1000, 5);
  const auto j = to_json(loglog_tail_fit(v, Side::Right, 0.1));
  CHECK(j.at("method") == "loglog_ls");
  CHECK(j.contains("r_squared"));
}
