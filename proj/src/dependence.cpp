#include "tou/dependence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "tou/errors.hpp"
#include "tou/gaussian.hpp"
#include "tou/parallel.hpp"

namespace tou {

std::vector<double> midranks(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && x[order[j]] == x[order[i]]) ++j;
    // positions i..j-1 (0-based) share rank ((i+1) + j) / 2
    const double r = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t) ranks[order[t]] = r;
    i = j;
  }
  return ranks;
}

RankedPairs rank_pairs(std::span<const Pair> pairs) {
  const std::size_t n = pairs.size();
  auto integer_ranks = [n](auto key) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
    std::vector<std::size_t> ranks(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0 && key(order[i]) == key(order[i - 1])) throw Error(ErrorKind::InvalidParameter, "rank_pairs: tied values");
      ranks[order[i]] = i + 1;
    }
    return ranks;
  };
  return {integer_ranks([&](std::size_t i) { return pairs[i].first; }),
          integer_ranks([&](std::size_t i) { return pairs[i].second; })};
}

namespace {

double spearman_from_ranks(std::span<const double> ru, std::span<const double> rv) {
  const auto n = static_cast<double>(ru.size());
  const double center = 0.5 * (n + 1.0);
  double sum = 0.0;
  for (std::size_t j = 0; j < ru.size(); ++j) sum += (ru[j] - center) * (rv[j] - center);
  return std::clamp(12.0 * sum / (n * (n * n - 1.0)), -1.0, 1.0);
}

bool is_constant(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); });
}

}  // namespace

double spearman_rho(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw Error(ErrorKind::InvalidParameter, "spearman_rho: length mismatch");
  if (u.size() < 2) throw Error(ErrorKind::InsufficientData, "spearman_rho: need n >= 2");
  if (is_constant(u) || is_constant(v))
    throw Error(ErrorKind::UndefinedCorrelation, "spearman_rho: a coordinate is constant");
  const auto ru = midranks(u);
  const auto rv = midranks(v);
  return spearman_from_ranks(ru, rv);
}

double spearman_rho(std::span<const Pair> pairs) {
  std::vector<double> u(pairs.size());
  std::vector<double> v(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    u[i] = pairs[i].first;
    v[i] = pairs[i].second;
  }
  return spearman_rho(u, v);
}

double spearman_rho(const RankedPairs& ranks) {
  const std::size_t n = ranks.u_ranks.size();
  if (n != ranks.v_ranks.size()) throw Error(ErrorKind::InvalidParameter, "spearman_rho: length mismatch");
  if (n < 2) throw Error(ErrorKind::InsufficientData, "spearman_rho: need n >= 2");
  // Doubled centered ranks are integers: 2r - (n+1).
  long long sum = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const long long du = 2 * static_cast<long long>(ranks.u_ranks[j]) - static_cast<long long>(n + 1);
    const long long dv = 2 * static_cast<long long>(ranks.v_ranks[j]) - static_cast<long long>(n + 1);
    sum += du * dv;
  }
  const auto nd = static_cast<double>(n);
  return 3.0 * static_cast<double>(sum) / (nd * (nd * nd - 1.0));
}

double spearman_from_rho(double rho) {
  if (!(std::abs(rho) <= 1.0)) throw Error(ErrorKind::Domain, "spearman_from_rho: |rho| must be <= 1");
  return 6.0 / std::numbers::pi * std::asin(0.5 * rho);
}

double rho_from_spearman(double rho_s) {
  if (!(std::abs(rho_s) <= 1.0)) throw Error(ErrorKind::Domain, "rho_from_spearman: |rho_s| must be <= 1");
  if (std::abs(rho_s) == 1.0) return rho_s;
  return 2.0 * std::sin(std::numbers::pi * rho_s / 6.0);
}

std::vector<Pair> gauss_copula_sample(double rho, std::size_t n, RngSeed seed) {
  if (!(std::abs(rho) < 1.0)) throw Error(ErrorKind::DegenerateCopula, "gauss_copula_sample: |rho| must be < 1");
  Rng rng(seed);
  const double c = std::sqrt((1.0 - rho) * (1.0 + rho));
  constexpr double kBelowOne = 1.0 - 0x1.0p-53;
  std::vector<Pair> out(n);
  for (auto& [u, v] : out) {
    u = rng.uniform();
    const double z1 = norm_quantile(u);
    const double z2 = rho * z1 + c * rng.normal();
    v = std::clamp(norm_cdf(z2), std::numeric_limits<double>::min(), kBelowOne);
  }
  return out;
}

std::vector<Pair> pseudo_observations(std::span<const Pair> pairs) {
  std::vector<double> u(pairs.size());
  std::vector<double> v(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    u[i] = pairs[i].first;
    v[i] = pairs[i].second;
  }
  const auto ru = midranks(u);
  const auto rv = midranks(v);
  const auto denom = static_cast<double>(pairs.size() + 1);
  std::vector<Pair> out(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) out[i] = {ru[i] / denom, rv[i] / denom};
  return out;
}

double gauss_copula_cdf(double rho, double u, double v) {
  if (!(std::abs(rho) < 1.0)) throw Error(ErrorKind::DegenerateCopula, "gauss_copula_cdf: |rho| must be < 1");
  u = std::clamp(u, 0.0, 1.0);
  v = std::clamp(v, 0.0, 1.0);
  if (u == 0.0 || v == 0.0) return 0.0;
  if (u == 1.0) return v;
  if (v == 1.0) return u;
  return std::clamp(bvn_cdf(norm_quantile(u), norm_quantile(v), rho), 0.0, std::min(u, v));
}

std::vector<double> empirical_copula_at_points(std::span<const Pair> pseudo) {
  const std::size_t n = pseudo.size();
  if (n == 0) return {};
  // Sweep in u order with a Fenwick tree over compressed v values.
  std::vector<double> vs(n);
  for (std::size_t i = 0; i < n; ++i) vs[i] = pseudo[i].second;
  std::sort(vs.begin(), vs.end());
  vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
  std::vector<std::size_t> tree(vs.size() + 1, 0);
  auto slot = [&](double v) {
    return static_cast<std::size_t>(std::upper_bound(vs.begin(), vs.end(), v) - vs.begin());
  };
  auto add = [&](std::size_t i) {
    for (; i < tree.size(); i += i & (~i + 1)) ++tree[i];
  };
  auto prefix = [&](std::size_t i) {
    std::size_t s = 0;
    for (; i > 0; i -= i & (~i + 1)) s += tree[i];
    return s;
  };

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pseudo[a].first < pseudo[b].first; });
  std::vector<double> out(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && pseudo[order[j]].first == pseudo[order[i]].first) add(slot(pseudo[order[j++]].second));
    for (std::size_t t = i; t < j; ++t)
      out[order[t]] = static_cast<double>(prefix(slot(pseudo[order[t]].second))) / static_cast<double>(n);
    i = j;
  }
  return out;
}

double cramer_von_mises(std::span<const Pair> pseudo, double rho) {
  const auto empirical = empirical_copula_at_points(pseudo);
  double stat = 0.0;
  for (std::size_t j = 0; j < pseudo.size(); ++j) {
    const double d = empirical[j] - gauss_copula_cdf(rho, pseudo[j].first, pseudo[j].second);
    stat += d * d;
  }
  return stat;
}

nlohmann::json to_json(const CopulaFit& fit) {
  return {{"rho", fit.rho},
          {"rho_s_hat", fit.rho_s_hat},
          {"gof_statistic", fit.gof_statistic},
          {"p_value", fit.p_value},
          {"n_bootstrap", fit.n_bootstrap},
          {"n", fit.n},
          {"seed", fit.seed.seed},
          {"stream_id", fit.seed.stream_id},
          {"statistic", "cramer_von_mises"}};
}

CopulaFit gauss_copula_gof(std::span<const Pair> pairs, std::size_t n_bootstrap, RngSeed seed) {
  const std::size_t n = pairs.size();
  if (n < 20) throw Error(ErrorKind::InsufficientData, "gauss_copula_gof: need n >= 20");
  if (n_bootstrap < 100) throw Error(ErrorKind::InvalidParameter, "gauss_copula_gof: need n_bootstrap >= 100");

  const auto pseudo = pseudo_observations(pairs);
  CopulaFit fit;
  fit.rho_s_hat = spearman_rho(pairs);
  fit.rho = rho_from_spearman(fit.rho_s_hat);
  if (!(std::abs(fit.rho) < 1.0)) throw Error(ErrorKind::DegenerateCopula, "gauss_copula_gof: fitted |rho| = 1");
  fit.gof_statistic = cramer_von_mises(pseudo, fit.rho);
  fit.n_bootstrap = n_bootstrap;
  fit.n = n;
  fit.seed = seed;

  std::vector<double> replicate(n_bootstrap);
  parallel_for(n_bootstrap, [&](std::size_t b) {
    const auto sample = gauss_copula_sample(fit.rho, n, seed.substream(b));
    const auto boot_pseudo = pseudo_observations(sample);
    const double rho_b = rho_from_spearman(spearman_rho(sample));
    replicate[b] = std::abs(rho_b) < 1.0 ? cramer_von_mises(boot_pseudo, rho_b) : std::numeric_limits<double>::infinity();
  });
  const auto exceed = std::count_if(replicate.begin(), replicate.end(), [&](double s) { return s >= fit.gof_statistic; });
  fit.p_value = static_cast<double>(exceed) / static_cast<double>(n_bootstrap);
  return fit;
}

double spearman_perturbation_bound(double eps1, double eps2) {
  if (!(eps1 >= 0.0 && eps1 <= 1.0 && eps2 >= 0.0 && eps2 <= 1.0))
    throw Error(ErrorKind::Domain, "spearman_perturbation_bound: eps must be in [0, 1]");
  return 18.0 * (eps1 + eps2) + 12.0 * eps1 * eps2;
}

}  // namespace tou
