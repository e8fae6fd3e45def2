#include "tou/validation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "tou/alpha_estimators.hpp"
#include "tou/dependence.hpp"
#include "tou/errors.hpp"
#include "tou/ou_core.hpp"
#include "tou/parallel.hpp"
#include "tou/tail_stats.hpp"
#include "tou/transform.hpp"

namespace tou {

namespace {

Check make_check(const char* suite, std::string name, double statistic, double target, double lower, double upper,
                 std::string detail = {}) {
  Check c;
  c.suite = suite;
  c.name = std::move(name);
  c.statistic = statistic;
  c.target = target;
  c.lower = lower;
  c.upper = upper;
  c.pass = std::isfinite(statistic) && statistic >= lower && statistic <= upper;
  c.detail = std::move(detail);
  return c;
}

Check relative_check(const char* suite, std::string name, double statistic, double target, double rel) {
  const double tol = rel * std::abs(target);
  return make_check(suite, std::move(name), statistic, target, target - tol, target + tol);
}

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

Moments moments(const std::vector<double>& v) {
  const auto n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, ss / (n - 1.0)};
}

double mean_square_about(const std::vector<double>& v, double centre) {
  double ss = 0.0;
  for (double x : v) ss += (x - centre) * (x - centre);
  return ss / static_cast<double>(v.size());
}

}  // namespace

const char* to_string(Suite suite) noexcept {
  switch (suite) {
    case Suite::T1: return "T1";
    case Suite::T2: return "T2";
    case Suite::T3: return "T3";
    case Suite::T4: return "T4";
    case Suite::All: return "ALL";
  }
  return "?";
}

Suite suite_from_string(const std::string& name) {
  for (Suite s : {Suite::T1, Suite::T2, Suite::T3, Suite::T4, Suite::All})
    if (name == to_string(s)) return s;
  throw Error(ErrorKind::InvalidParameter, "unknown suite '" + name + "' (expected T1, T2, T3, T4 or ALL)");
}

void ValidationBudget::validate() const {
  auto within = [](std::size_t v, std::size_t lo, std::size_t hi, const char* name) {
    if (v < lo || v > hi)
      throw Error(ErrorKind::InvalidParameter, std::string("budget: ") + name + " must lie in [" +
                                                   std::to_string(lo) + ", " + std::to_string(hi) + "]");
  };
  within(t1_samples, 100, 10'000'000, "t1_samples");
  within(t2_constructions, 1, 100'000, "t2_constructions");
  within(t2_pairs, 20, 1'000'000, "t2_pairs");
  within(t3_replications, 2, 100'000, "t3_replications");
  within(t3_length, 100, 10'000'000, "t3_length");
  within(t3_terms, 1, 10'000, "t3_terms");
  within(t3_qmc_points, 64, 1 << 22, "t3_qmc_points");
  within(t4_replications, 2, 1'000'000, "t4_replications");
  within(t4_length, 100, 1'000'000, "t4_length");
}

nlohmann::json ValidationBudget::to_json() const {
  return {{"t1_samples", t1_samples},           {"t2_constructions", t2_constructions},
          {"t2_pairs", t2_pairs},               {"t3_replications", t3_replications},
          {"t3_length", t3_length},             {"t3_terms", t3_terms},
          {"t3_qmc_points", t3_qmc_points},     {"t4_replications", t4_replications},
          {"t4_length", t4_length}};
}

ValidationBudget ValidationBudget::from_json(const nlohmann::json& j) {
  ValidationBudget b;
  auto read = [&](const char* key, std::size_t& field) {
    if (j.contains(key)) field = j.at(key).get<std::size_t>();
  };
  try {
    read("t1_samples", b.t1_samples);
    read("t2_constructions", b.t2_constructions);
    read("t2_pairs", b.t2_pairs);
    read("t3_replications", b.t3_replications);
    read("t3_length", b.t3_length);
    read("t3_terms", b.t3_terms);
    read("t3_qmc_points", b.t3_qmc_points);
    read("t4_replications", b.t4_replications);
    read("t4_length", b.t4_length);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidParameter, std::string("budget: ") + e.what());
  }
  b.validate();
  return b;
}

bool ValidationReport::all_pass() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

nlohmann::json to_json(const ValidationReport& report) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : report.checks)
    arr.push_back({{"suite", c.suite},
                   {"name", c.name},
                   {"statistic", c.statistic},
                   {"target", c.target},
                   {"lower", c.lower},
                   {"upper", c.upper},
                   {"pass", c.pass},
                   {"detail", c.detail}});
  return {{"all_pass", report.all_pass()}, {"checks", arr}};
}

std::vector<Check> check_theorem1(const ValidationBudget& budget, RngSeed seed) {
  std::vector<Check> out;
  const auto h = TransformSpec::paper_example();
  // alpha = 0.05 with sigma² = 1.
  const OUParams p(0.05, std::sqrt(0.1));
  const double right = stationary_tail_index(h, p, Side::Right).index;
  const double left = stationary_tail_index(h, p, Side::Left).index;
  out.push_back(relative_check("T1", "stationary_index_right", right, 2.5, 1e-12));
  out.push_back(relative_check("T1", "stationary_index_left", left, 5.0, 1e-12));
  const double trans = transition_tail_index(h, p, 20.0, Side::Right).index;
  out.push_back(relative_check("T1", "transition_index_right_u20", trans, 2.5 / -std::expm1(-2.0), 1e-12));

  const std::size_t n = budget.t1_samples;
  std::vector<double> y(n);
  std::vector<double> diff(n);
  {
    Rng rng(seed.substream(0));
    for (auto& v : y) v = h(rng.normal());
  }
  {
    Rng rng(seed.substream(1));
    const double r = std::exp(-1.0);
    const double c = std::sqrt(1.0 - r * r);
    for (auto& d : diff) {
      const double z1 = rng.normal();
      const double z2 = r * z1 + c * rng.normal();
      d = h(z2) - h(z1);
    }
  }
  out.push_back(make_check("T1", "hill_2pct_iid_right", hill_estimator(y, Side::Right, 2.0).index, 2.5, 2.25, 2.75));
  out.push_back(make_check("T1", "hill_2pct_iid_left", hill_estimator(y, Side::Left, 2.0).index, 5.0, 4.3, 5.7));
  out.push_back(
      make_check("T1", "hill_2pct_differences_right", hill_estimator(diff, Side::Right, 2.0).index, 2.5, 2.2, 2.9));
  return out;
}

std::vector<Check> check_theorem2(const ValidationBudget& budget, RngSeed seed) {
  const std::size_t trials = budget.t2_constructions;
  const std::size_t n = budget.t2_pairs;
  std::vector<double> excess(trials);
  parallel_for(trials, [&](std::size_t t) {
    Rng rng(seed.substream(t));
    const double eps1 = 0.1 * rng.uniform();
    const double eps2 = 0.1 * rng.uniform();
    const double rho = 1.8 * rng.uniform() - 0.9;
    const double scale_u = 0.5 + 4.5 * rng.uniform();
    const double scale_v = 0.5 + 4.5 * rng.uniform();
    const double c = std::sqrt(1.0 - rho * rho);
    std::vector<double> u(n), v(n), u1(n), v1(n);
    for (std::size_t j = 0; j < n; ++j) {
      u[j] = rng.normal();
      v[j] = rho * u[j] + c * rng.normal();
      const double xi = rng.uniform() < eps1 ? scale_u * rng.normal() : 0.0;
      const double eta = rng.uniform() < eps2 ? scale_v * rng.normal() : 0.0;
      u1[j] = u[j] + xi;
      v1[j] = v[j] + eta;
    }
    const double shift = std::abs(spearman_rho(u1, v1) - spearman_rho(u, v));
    const double se = 1.0 / std::sqrt(static_cast<double>(n - 1));
    excess[t] = shift - (spearman_perturbation_bound(eps1, eps2) + 5.0 * se);
  });
  const auto violations = std::count_if(excess.begin(), excess.end(), [](double e) { return e > 0.0; });
  const double worst = *std::max_element(excess.begin(), excess.end());
  return {make_check("T2", "bound_violations", static_cast<double>(violations), 0.0, 0.0, 0.0,
                     "max(shift - bound - 5 se) = " + std::to_string(worst))};
}

std::vector<Check> check_theorem3(const ValidationBudget& budget, RngSeed seed) {
  constexpr double alpha = 0.05;
  constexpr std::size_t k = 20;
  const std::size_t reps = budget.t3_replications;
  const std::size_t n = budget.t3_length;
  const auto h = TransformSpec::paper_example();
  const double median = h(0.0);

  std::vector<double> known(reps), empirical(reps), p_hat(reps);
  std::vector<char> ok(reps);
  parallel_for(reps, [&](std::size_t r) {
    const auto x = simulate_stationary(OUParams(alpha, 1.0), n, 1.0, seed.substream(r));
    std::vector<double> y(x.size());
    std::transform(x.values().begin(), x.values().end(), y.begin(), [&](double v) { return h(v); });
    const SamplePath path(0.0, 1.0, std::move(y));
    const auto a = alpha_sign_known_median(path, k, median);
    const auto b = alpha_sign_empirical_median(path, k);
    ok[r] = a.value && b.value;
    known[r] = a.value.value_or(0.0);
    empirical[r] = b.value.value_or(0.0);
    p_hat[r] = a.diagnostics.at("p_hat");
  });
  const auto flagged = static_cast<std::size_t>(std::count(ok.begin(), ok.end(), 0));
  const std::string flagged_note = std::to_string(flagged) + " of " + std::to_string(reps) +
                                   " replications out of domain and excluded";
  std::vector<double> known_ok, empirical_ok;
  for (std::size_t r = 0; r < reps; ++r) {
    if (!ok[r]) continue;
    known_ok.push_back(known[r]);
    empirical_ok.push_back(empirical[r]);
  }
  std::vector<Check> out;
  if (known_ok.size() < 2) {
    out.push_back(make_check("T3", "in_domain_replications", static_cast<double>(known_ok.size()), 0.0, 2.0,
                             static_cast<double>(reps), flagged_note));
    return out;
  }

  const auto m = moments(known_ok);
  const double se = std::sqrt(m.var / static_cast<double>(known_ok.size()));
  out.push_back(make_check("T3", "mean_known_median", m.mean, alpha, alpha - 3.0 * se, alpha + 3.0 * se,
                           "3 se = " + std::to_string(3.0 * se) + "; " + flagged_note));

  const auto v2 = asymptotic_variance(alpha, k, budget.t3_terms, budget.t3_qmc_points,
                                      RngSeed{seed.seed, seed.stream_id + 1});
  const double predicted = sign_estimator_variance(alpha, k, n, v2.value);
  auto var_check = relative_check("T3", "variance_known_median", m.var, predicted, 0.15);
  var_check.detail = "v_k^2 = " + std::to_string(v2.value) + " +- " + std::to_string(v2.std_error);
  out.push_back(var_check);

  const auto mp = moments(p_hat);
  out.push_back(relative_check("T3", "variance_p_hat_times_n", mp.var * static_cast<double>(n), v2.value, 0.15));

  const double rmse_known = std::sqrt(mean_square_about(known_ok, alpha));
  const double rmse_emp = std::sqrt(mean_square_about(empirical_ok, alpha));
  out.push_back(make_check("T3", "rmse_empirical_over_known", rmse_emp / rmse_known, 1.0, 0.0, 1.0));
  return out;
}

std::vector<Check> check_theorem4(const ValidationBudget& budget, RngSeed seed) {
  constexpr std::size_t k = 20;
  const std::size_t reps = budget.t4_replications;
  const std::size_t n = budget.t4_length;
  std::vector<double> p0(reps), p(reps);
  parallel_for(reps, [&](std::size_t r) {
    Rng rng(seed.substream(r));
    std::vector<double> x(n);
    for (auto& v : x) v = rng.normal();
    p0[r] = sign_pair_fraction(x, k, 0.0);
    p[r] = sign_pair_fraction(x, k, empirical_median(x));
  });
  const auto theory = theorem4_moments(n, k);
  const auto m0 = moments(p0);
  const auto m1 = moments(p);
  const double se0 = std::sqrt(m0.var / static_cast<double>(reps));
  const double se1 = std::sqrt(m1.var / static_cast<double>(reps));

  std::vector<Check> out;
  out.push_back(make_check("T4", "mean_p0", m0.mean, theory.mean_p0, theory.mean_p0 - 3.0 * se0,
                           theory.mean_p0 + 3.0 * se0));
  out.push_back(relative_check("T4", "var_p0", m0.var, theory.var_p0, 0.05));
  out.push_back(make_check("T4", "mean_p", m1.mean, theory.mean_p, theory.mean_p - 3.0 * se1,
                           theory.mean_p + 3.0 * se1));
  out.push_back(relative_check("T4", "var_p", m1.var, theory.var_p, 0.10));
  const double ratio = std::sqrt(mean_square_about(p0, 0.25) / mean_square_about(p, 0.25));
  out.push_back(relative_check("T4", "rmse_ratio", ratio, std::sqrt(5.0), 0.10));
  return out;
}

ValidationReport validate_theorems(Suite suite, const ValidationBudget& budget, RngSeed seed) {
  budget.validate();
  ValidationReport report;
  auto append = [&](std::vector<Check> checks) {
    report.checks.insert(report.checks.end(), checks.begin(), checks.end());
  };
  auto stream = [&](std::uint64_t i) { return RngSeed{seed.seed, seed.stream_id * 8 + i}; };
  if (suite == Suite::T1 || suite == Suite::All) append(check_theorem1(budget, stream(1)));
  if (suite == Suite::T2 || suite == Suite::All) append(check_theorem2(budget, stream(2)));
  if (suite == Suite::T3 || suite == Suite::All) append(check_theorem3(budget, stream(3)));
  if (suite == Suite::T4 || suite == Suite::All) append(check_theorem4(budget, stream(4)));
  return report;
}

}  // namespace tou
