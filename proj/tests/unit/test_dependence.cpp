#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "support.hpp"
#include "tou/dependence.hpp"

using namespace tou;
using tou::test::rel_err;
using tou::test::throws_kind;

TEST_CASE("spearman by hand") {
  const std::vector<Pair> pairs = {{1, 2}, {2, 1}, {3, 3}};
  CHECK(spearman_rho(pairs) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(spearman_rho(rank_pairs(pairs)) == 0.5);

  std::vector<Pair> up, down;
  for (int i = 0; i < 50; ++i) {
    up.emplace_back(i, std::exp(0.1 * i));
    down.emplace_back(i, -i * i);
  }
  CHECK(spearman_rho(up) == 1.0);
  CHECK(spearman_rho(down) == -1.0);
}

TEST_CASE("midranks and errors") {
  const std::vector<double> x = {3.0, 1.0, 2.0, 2.0};
  CHECK(midranks(x) == std::vector<double>{4.0, 1.0, 2.5, 2.5});
  const std::vector<Pair> tied = {{1, 1}, {1, 2}};
  CHECK(throws_kind([&] { (void)rank_pairs(tied); }, ErrorKind::InvalidParameter));
  const std::vector<Pair> one = {{1, 2}};
  CHECK(throws_kind([&] { (void)spearman_rho(one); }, ErrorKind::InsufficientData));
  const std::vector<Pair> flat = {{1, 2}, {2, 2}, {3, 2}};
  CHECK(throws_kind([&] { (void)spearman_rho(flat); }, ErrorKind::UndefinedCorrelation));
}

TEST_CASE("spearman is invariant under increasing transforms") {
  const auto pairs = gauss_copula_sample(0.4, 500, {3, 1});
  std::vector<Pair> moved;
  for (const auto& [u, v] : pairs) moved.emplace_back(std::log(u) * 3.0 + 1.0, std::pow(v, 5.0));
  CHECK(spearman_rho(moved) == spearman_rho(pairs));
  CHECK(spearman_rho(rank_pairs(moved)) == spearman_rho(rank_pairs(pairs)));
  CHECK(std::abs(spearman_rho(rank_pairs(pairs)) - spearman_rho(pairs)) < 1e-14);
}

TEST_CASE("gaussian link between rho and spearman's rho") {
  CHECK(spearman_from_rho(0.0) == 0.0);
  CHECK(rel_err(spearman_from_rho(1.0), 1.0) < 1e-15);
  CHECK(rel_err(spearman_from_rho(0.5), 0.482583739530997463) < 1e-14);
  CHECK(rel_err(spearman_from_rho(0.695), 0.677815999072871211) < 1e-14);
  CHECK(rel_err(rho_from_spearman(0.676088), 0.693302930948206536) < 1e-14);
  CHECK(rho_from_spearman(1.0) == 1.0);
  CHECK(rho_from_spearman(-1.0) == -1.0);
  for (double r = -1.0; r <= 1.0; r += 0.01) {
    CHECK(std::abs(rho_from_spearman(spearman_from_rho(r)) - r) < 1e-14);
    CHECK(spearman_from_rho(-r) == -spearman_from_rho(r));
  }
  CHECK(throws_kind([] { (void)spearman_from_rho(1.01); }, ErrorKind::Domain));
  CHECK(throws_kind([] { (void)rho_from_spearman(-1.5); }, ErrorKind::Domain));
}

TEST_CASE("gauss copula sampling") {
  const std::size_t n = 1000000;
  const auto ind = gauss_copula_sample(0.0, n, {8, 0});
  CHECK(std::abs(spearman_rho(ind)) < 3.0 / std::sqrt(static_cast<double>(n)));

  const auto dep = gauss_copula_sample(0.695, 100000, {8, 1});
  CHECK(std::abs(spearman_rho(dep) - spearman_from_rho(0.695)) < 4.0 / std::sqrt(100000.0));

  // Kolmogorov-Smirnov on each margin at the 1% level.
  for (int coord = 0; coord < 2; ++coord) {
    std::vector<double> m(dep.size());
    for (std::size_t i = 0; i < dep.size(); ++i) m[i] = coord == 0 ? dep[i].first : dep[i].second;
    std::sort(m.begin(), m.end());
    double d = 0.0;
    const auto nn = static_cast<double>(m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
      d = std::max({d, (static_cast<double>(i) + 1) / nn - m[i], m[i] - static_cast<double>(i) / nn});
    CHECK(d < 1.628 / std::sqrt(nn));
  }
  for (const auto& [u, v] : dep) {
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    REQUIRE(v > 0.0);
    REQUIRE(v < 1.0);
  }
  CHECK(gauss_copula_sample(0.3, 10, {1, 1}) == gauss_copula_sample(0.3, 10, {1, 1}));
  CHECK(throws_kind([] { (void)gauss_copula_sample(1.0, 10, {}); }, ErrorKind::DegenerateCopula));
}

TEST_CASE("pseudo observations") {
  std::vector<Pair> pairs;
  for (int i = 0; i < 95; ++i) pairs.emplace_back(i * 0.5, -i);
  const auto p = pseudo_observations(pairs);
  CHECK(p[0].first == 1.0 / 96.0);
  CHECK(p[94].first == 95.0 / 96.0);
  CHECK(p[0].second == 95.0 / 96.0);
  const std::vector<Pair> single = {{3.0, -7.0}};
  CHECK(pseudo_observations(single)[0] == Pair{0.5, 0.5});
  std::vector<Pair> moved;
  for (const auto& [u, v] : pairs) moved.emplace_back(std::exp(u), v * 3.0);
  CHECK(pseudo_observations(moved) == p);
}

TEST_CASE("gauss copula cdf") {
  CHECK(std::abs(gauss_copula_cdf(0.0, 0.3, 0.8) - 0.24) < 1e-15);
  CHECK(gauss_copula_cdf(0.6, 0.3, 1.0) == 0.3);
  CHECK(gauss_copula_cdf(0.6, 1.0, 0.7) == 0.7);
  CHECK(gauss_copula_cdf(0.6, 0.0, 0.7) == 0.0);
  CHECK(std::abs(gauss_copula_cdf(0.5, 0.5, 0.5) - 1.0 / 3.0) < 1e-15);
  for (double rho : {-0.9, -0.2, 0.4, 0.95}) {
    for (double u = 0.05; u < 1.0; u += 0.15) {
      for (double v = 0.05; v < 1.0; v += 0.15) {
        CHECK(gauss_copula_cdf(rho, u, v) == gauss_copula_cdf(rho, v, u));
        CHECK(gauss_copula_cdf(rho, u + 0.1, v) >= gauss_copula_cdf(rho, u, v));
        const double mass = gauss_copula_cdf(rho, u + 0.1, v + 0.1) - gauss_copula_cdf(rho, u, v + 0.1) -
                            gauss_copula_cdf(rho, u + 0.1, v) + gauss_copula_cdf(rho, u, v);
        CHECK(mass >= -1e-15);
      }
    }
  }
}

TEST_CASE("empirical copula matches a direct count") {
  Rng rng(4, 4);
  std::vector<Pair> pairs(300);
  for (auto& [u, v] : pairs) {
    u = std::floor(rng.uniform() * 40.0);
    v = std::floor(rng.uniform() * 40.0) + u;
  }
  const auto pseudo = pseudo_observations(pairs);
  const auto fast = empirical_copula_at_points(pseudo);
  for (std::size_t j = 0; j < pseudo.size(); ++j) {
    std::size_t count = 0;
    for (const auto& q : pseudo)
      if (q.first <= pseudo[j].first && q.second <= pseudo[j].second) ++count;
    CHECK(fast[j] == static_cast<double>(count) / 300.0);
  }
}

TEST_CASE("goodness of fit contract") {
  const auto pairs = gauss_copula_sample(0.7, 206, {21, 0});
  const auto fit = gauss_copula_gof(pairs, 100, {21, 1});
  CHECK(fit.p_value >= 0.0);
  CHECK(fit.p_value <= 1.0);
  CHECK(fit.n_bootstrap == 100);
  CHECK(fit.n == 206);
  CHECK(fit.rho == rho_from_spearman(fit.rho_s_hat));
  CHECK(fit.gof_statistic >= 0.0);
  const auto j = to_json(fit);
  CHECK(j.at("seed") == 21);
  CHECK(j.at("n_bootstrap") == 100);

  setenv("TOU_THREADS", "1", 1);
  const auto serial = gauss_copula_gof(pairs, 100, {21, 1});
  setenv("TOU_THREADS", "4", 1);
  const auto threaded = gauss_copula_gof(pairs, 100, {21, 1});
  unsetenv("TOU_THREADS");
  CHECK(serial.p_value == threaded.p_value);
  CHECK(serial.p_value == fit.p_value);

  const std::vector<Pair> few(pairs.begin(), pairs.begin() + 19);
  CHECK(throws_kind([&] { (void)gauss_copula_gof(few, 100, {}); }, ErrorKind::InsufficientData));
  CHECK(throws_kind([&] { (void)gauss_copula_gof(pairs, 99, {}); }, ErrorKind::InvalidParameter));
  std::vector<Pair> comonotone;
  for (int i = 0; i < 50; ++i) comonotone.emplace_back(i, i);
  CHECK(throws_kind([&] { (void)gauss_copula_gof(comonotone, 100, {}); }, ErrorKind::DegenerateCopula));
}

TEST_CASE("fitted rho recovers the generating parameter") {
  const double rho = 0.6;
  std::vector<double> fits(100);
  for (std::size_t r = 0; r < fits.size(); ++r)
    fits[r] = rho_from_spearman(spearman_rho(gauss_copula_sample(rho, 2000, RngSeed{31, 0}.substream(r))));
  double mean = 0.0, var = 0.0;
  for (double f : fits) mean += f / 100.0;
  for (double f : fits) var += (f - mean) * (f - mean) / 99.0;
  const auto fit = gauss_copula_gof(gauss_copula_sample(rho, 2000, {32, 0}), 100, {32, 1});
  CHECK(std::abs(fit.rho - rho) < 3.0 * std::sqrt(var));
  CHECK(std::abs(mean - rho) < 3.0 * std::sqrt(var / 100.0));
}

TEST_CASE("perturbation bound") {
  CHECK(spearman_perturbation_bound(0.0, 0.0) == 0.0);
  CHECK(rel_err(spearman_perturbation_bound(0.01, 0.02), 0.5424) < 1e-14);
  CHECK(throws_kind([] { (void)spearman_perturbation_bound(-0.1, 0.0); }, ErrorKind::Domain));
  CHECK(throws_kind([] { (void)spearman_perturbation_bound(0.0, 1.1); }, ErrorKind::Domain));
}
