#include "tou/alpha_estimators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "tou/dependence.hpp"
#include "tou/errors.hpp"
#include "tou/gaussian.hpp"
#include "tou/parallel.hpp"
#include "tou/quadrature.hpp"

namespace tou {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;
// -zeta(1/2) / sqrt(2 pi): mean overshoot of a Gaussian random walk, in step standard deviations.
constexpr double kDiscreteMonitoringShift = 0.5825971579390106;

void require_lag(const SamplePath& series, std::size_t k) {
  if (k == 0) throw Error(ErrorKind::Domain, "lag k must be >= 1");
  if (series.size() < k + 2) throw Error(ErrorKind::InsufficientData, "series shorter than k + 2");
}

AlphaEstimate sign_estimate(const SamplePath& series, std::size_t k, double level, AlphaMethod method) {
  require_lag(series, k);
  AlphaEstimate est;
  est.method = method;
  est.lag = k;
  est.n_used = series.size() - k;
  const double p_hat = sign_pair_fraction(series.values(), k, level);
  est.diagnostics["p_hat"] = p_hat;
  est.diagnostics["median"] = level;
  if (p_hat > 0.25 && p_hat < 0.5) {
    est.value = g_link(p_hat) / (static_cast<double>(k) * series.dt());
  } else {
    est.status = EstimateStatus::OutOfDomain;
  }
  return est;
}

}  // namespace

const char* to_string(AlphaMethod method) noexcept {
  switch (method) {
    case AlphaMethod::RankCorr: return "rank_corr";
    case AlphaMethod::RankCorrIncrements: return "rank_corr_increments";
    case AlphaMethod::SignKnownMedian: return "sign_known_median";
    case AlphaMethod::SignEmpiricalMedian: return "sign_empirical_median";
    case AlphaMethod::BandCrossing: return "band_crossing";
  }
  return "?";
}

const char* to_string(EstimateStatus status) noexcept {
  switch (status) {
    case EstimateStatus::Ok: return "ok";
    case EstimateStatus::LogDomain: return "log_domain";
    case EstimateStatus::OutOfDomain: return "out_of_domain";
    case EstimateStatus::InsufficientCrossings: return "insufficient_crossings";
  }
  return "?";
}

nlohmann::json to_json(const AlphaEstimate& e) {
  nlohmann::json j;
  j["method"] = to_string(e.method);
  j["status"] = to_string(e.status);
  j["n_used"] = e.n_used;
  j["value"] = e.value ? nlohmann::json(*e.value) : nlohmann::json(nullptr);
  if (e.lag) j["k"] = *e.lag;
  if (e.band) j["band"] = {{"A", e.band->first}, {"B", e.band->second}};
  j["diagnostics"] = e.diagnostics;
  if (e.provenance) j["seed"] = {{"seed", e.provenance->seed}, {"stream_id", e.provenance->stream_id}};
  return j;
}

AlphaEstimate alpha_rank(const SamplePath& series, std::size_t k) {
  require_lag(series, k);
  const auto& y = series.values();
  const std::size_t m = y.size() - k;
  const std::span<const double> lead(y.data(), m);
  const std::span<const double> lagged(y.data() + k, m);

  AlphaEstimate est;
  est.method = AlphaMethod::RankCorr;
  est.lag = k;
  est.n_used = m;
  const double rho_s = spearman_rho(lead, lagged);
  est.diagnostics["rho_s"] = rho_s;
  if (!(rho_s > 0.0)) {
    est.status = EstimateStatus::LogDomain;
    return est;
  }
  // rho_s = 1 gives 2 sin(π/6) = 1 and alpha = 0.
  const double value = -std::log(rho_from_spearman(rho_s)) / (static_cast<double>(k) * series.dt());
  est.value = value == 0.0 ? 0.0 : value;
  return est;
}

AlphaEstimate alpha_rank_increments(const SamplePath& series, std::size_t k, std::size_t delta) {
  if (delta == 0 || k == 0 || k >= delta) throw Error(ErrorKind::Domain, "alpha_rank_increments: need 0 < k < delta");
  const auto& y = series.values();
  if (y.size() < delta + k + 2) throw Error(ErrorKind::InsufficientData, "alpha_rank_increments: series too short");
  std::vector<double> inc(y.size() - delta);
  for (std::size_t t = delta; t < y.size(); ++t) inc[t - delta] = y[t] - y[t - delta];
  const std::size_t m = inc.size() - k;

  AlphaEstimate est;
  est.method = AlphaMethod::RankCorrIncrements;
  est.lag = k;
  est.n_used = m;
  est.diagnostics["delta"] = static_cast<double>(delta);
  const double rho_s = spearman_rho(std::span<const double>(inc.data(), m), std::span<const double>(inc.data() + k, m));
  const double rho = rho_from_spearman(rho_s);
  est.diagnostics["rho_s"] = rho_s;
  est.diagnostics["rho"] = rho;

  // The correlation decreases from 1 - k/delta as alpha grows from 0; take the
  // first crossing on a log grid and bisect.
  const auto kd = static_cast<double>(k);
  const auto dd = static_cast<double>(delta);
  auto excess = [&](double alpha) { return increment_correlation(OUParams(alpha, 1.0), dd, kd) - rho; };
  if (!(rho > 0.0) || !(rho < 1.0 - kd / dd)) {
    est.status = EstimateStatus::OutOfDomain;
    return est;
  }
  double lo = 1e-10;
  double hi = lo;
  bool found = false;
  for (int i = 1; i <= 480; ++i) {
    hi = 1e-10 * std::pow(10.0, i / 40.0);
    if (excess(hi) <= 0.0) {
      found = true;
      break;
    }
    lo = hi;
  }
  if (!found) {
    est.status = EstimateStatus::OutOfDomain;
    return est;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  est.value = 0.5 * (lo + hi) / series.dt();
  return est;
}

double sign_prob(double alpha, double k) {
  if (!(alpha > 0.0) || !(k > 0.0)) throw Error(ErrorKind::Domain, "sign_prob: alpha and k must be > 0");
  return orthant2(std::exp(-alpha * k));
}

double g_link(double x) {
  if (!(x > 0.25 && x < 0.5)) throw Error(ErrorKind::Domain, "g_link: x must lie in (1/4, 1/2)");
  return -std::log(std::sin(2.0 * std::numbers::pi * (x - 0.25)));
}

double g_link_derivative(double x) {
  if (!(x > 0.25 && x < 0.5)) throw Error(ErrorKind::Domain, "g_link_derivative: x must lie in (1/4, 1/2)");
  const double angle = 2.0 * std::numbers::pi * (x - 0.25);
  return -2.0 * std::numbers::pi * std::cos(angle) / std::sin(angle);
}

double empirical_median(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorKind::EmptyInput, "empirical_median: no data");
  std::vector<double> v(values.begin(), values.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return lower + 0.5 * (upper - lower);
}

double sign_pair_fraction(std::span<const double> values, std::size_t k, double level) {
  if (k == 0 || values.size() <= k) throw Error(ErrorKind::InsufficientData, "sign_pair_fraction: need n > k >= 1");
  const std::size_t pairs = values.size() - k;
  std::size_t hits = 0;
  for (std::size_t j = 0; j < pairs; ++j)
    if (values[j] > level && values[j + k] > level) ++hits;
  return static_cast<double>(hits) / static_cast<double>(pairs);
}

AlphaEstimate alpha_sign_known_median(const SamplePath& series, std::size_t k, double median) {
  return sign_estimate(series, k, median, AlphaMethod::SignKnownMedian);
}

AlphaEstimate alpha_sign_empirical_median(const SamplePath& series, std::size_t k) {
  require_lag(series, k);
  return sign_estimate(series, k, empirical_median(series.values()), AlphaMethod::SignEmpiricalMedian);
}

AsymptoticVariance asymptotic_variance(double alpha, std::size_t k, std::size_t n_terms, std::size_t mc_size,
                                       RngSeed seed) {
  if (!(alpha > 0.0) || k == 0) throw Error(ErrorKind::Domain, "asymptotic_variance: need alpha > 0, k >= 1");
  if (n_terms == 0) throw Error(ErrorKind::Domain, "asymptotic_variance: n_terms must be >= 1");
  const double p = sign_prob(alpha, static_cast<double>(k));

  std::vector<double> term(n_terms);
  std::vector<double> term_se(n_terms);
  parallel_for(n_terms, [&](std::size_t idx) {
    const std::size_t l = idx + 1;
    std::array<std::size_t, 4> times = {0, l, k, k + l};
    std::sort(times.begin(), times.end());
    const auto dim = static_cast<std::size_t>(std::unique(times.begin(), times.end()) - times.begin());
    auto corr = [&](std::size_t i, std::size_t j) {
      const auto gap = static_cast<double>(times[i] > times[j] ? times[i] - times[j] : times[j] - times[i]);
      return std::exp(-alpha * gap);
    };
    double prob = 0.0;
    double se = 0.0;
    if (dim == 3) {
      prob = orthant3(corr(0, 1), corr(0, 2), corr(1, 2));
    } else {
      std::vector<double> c(dim * dim);
      for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) c[i * dim + j] = corr(i, j);
      Rng rng(seed.substream(l));
      const auto est = orthant_probability_qmc(c, dim, mc_size, rng);
      prob = est.value;
      se = est.std_error;
    }
    term[idx] = prob - p * p;
    term_se[idx] = se;
  });

  double sum = 0.0;
  double var = 0.0;
  for (std::size_t i = 0; i < n_terms; ++i) {
    sum += term[i];
    var += term_se[i] * term_se[i];
  }
  return {p * (1.0 - p) + 2.0 * sum, 2.0 * std::sqrt(var)};
}

double sign_estimator_variance(double alpha, std::size_t k, std::size_t n, double v2) {
  const double p = sign_prob(alpha, static_cast<double>(k));
  const double gp = g_link_derivative(p);
  const auto kd = static_cast<double>(k);
  return v2 * gp * gp / (static_cast<double>(n) * kd * kd);
}

Theorem4Moments theorem4_moments(std::size_t n, std::size_t k) {
  if (k == 0 || k >= n) throw Error(ErrorKind::Domain, "theorem4_moments: need 1 <= k < n");
  const auto nd = static_cast<double>(n);
  const auto nk = static_cast<double>(n - k);
  Theorem4Moments m;
  m.mean_p0 = 0.25;
  m.var_p0 = 5.0 / (16.0 * nk) - static_cast<double>(k) / (8.0 * nk * nk);
  m.mean_p = n % 2 == 1 ? 0.25 - 3.0 / (4.0 * nd) : (nd - 2.0) / (4.0 * (nd - 1.0));
  m.var_p = 1.0 / (16.0 * nd);
  m.var_p_asymptotic = true;
  return m;
}

BandSpec::BandSpec(double a, double b, double fa, double fb) : level_a(a), level_b(b), f_at_a(fa), f_at_b(fb) {
  if (!(fa > 0.0 && fa < fb && fb < 1.0)) throw Error(ErrorKind::InvalidParameter, "BandSpec: need 0 < F(A) < F(B) < 1");
  if (!(a < b)) throw Error(ErrorKind::InvalidParameter, "BandSpec: need A < B");
}

BandSpec BandSpec::from_model(const TransformSpec& h, const OUParams& p, double fa, double fb) {
  const double sigma = std::sqrt(stationary_variance(p));
  return BandSpec(h(sigma * norm_quantile(fa)), h(sigma * norm_quantile(fb)), fa, fb);
}

BandSpec BandSpec::from_quantiles(std::span<const double> values, double fa, double fb) {
  if (values.size() < 2) throw Error(ErrorKind::InsufficientData, "BandSpec::from_quantiles: need >= 2 values");
  if (!(fa > 0.0 && fa < fb && fb < 1.0)) throw Error(ErrorKind::InvalidParameter, "BandSpec: need 0 < F(A) < F(B) < 1");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  auto order_stat = [&](double f) {
    const auto idx = static_cast<std::size_t>(std::floor(f * static_cast<double>(v.size() - 1)));
    return v[idx];
  };
  return BandSpec(order_stat(fa), order_stat(fb), fa, fb);
}

double BandSpec::a_star() const noexcept { return norm_quantile(f_at_a) / std::numbers::sqrt2; }
double BandSpec::b_star() const noexcept { return norm_quantile(f_at_b) / std::numbers::sqrt2; }

namespace {

std::size_t panels_for(double a, double b) {
  return static_cast<std::size_t>(std::ceil(4.0 * (b - a) + 4.0 * std::max(std::abs(a), std::abs(b))) + 4.0);
}

}  // namespace

double mean_passage_down(double a, double b) {
  if (!(a < b)) throw Error(ErrorKind::Domain, "mean_passage_down: need a < b");
  return integrate_gl([](double x) { return kSqrtPi * std::exp(x * x) * std::erfc(x); }, a, b, panels_for(a, b));
}

double mean_passage_up(double a, double b) {
  if (!(a < b)) throw Error(ErrorKind::Domain, "mean_passage_up: need a < b");
  return integrate_gl([](double x) { return kSqrtPi * std::exp(x * x) * std::erfc(-x); }, a, b, panels_for(a, b));
}

double mean_excursion_time(double a_star, double b_star) {
  if (!(a_star < b_star)) throw Error(ErrorKind::Domain, "mean_excursion_time: degenerate band (a* >= b*)");
  return mean_passage_down(a_star, b_star) + mean_passage_up(a_star, b_star);
}

double mean_excursion_time(const BandSpec& band) { return mean_excursion_time(band.a_star(), band.b_star()); }

std::size_t count_band_transits(std::span<const double> values, double level_a, double level_b) {
  std::size_t count = 0;
  bool armed = false;  // seen above B since the last completed transit
  for (double v : values) {
    if (!armed) {
      armed = v > level_b;
    } else if (v < level_a) {
      ++count;
      armed = false;
    }
  }
  return count;
}

AlphaEstimate alpha_band_crossing(const SamplePath& series, const BandSpec& band, double horizon,
                                  BandCrossingOptions options) {
  if (!(horizon > 0.0)) throw Error(ErrorKind::Domain, "alpha_band_crossing: horizon must be > 0");
  if (horizon > series.duration() * (1.0 + 1e-12))
    throw Error(ErrorKind::Domain, "alpha_band_crossing: horizon exceeds series duration");
  const auto& y = series.values();
  const auto used = std::min(y.size(), static_cast<std::size_t>(std::floor(horizon / series.dt() + 1e-9)) + 1);
  const std::span<const double> window(y.data(), used);
  const auto [lo, hi] = std::minmax_element(window.begin(), window.end());
  if (!(band.level_a > *lo && band.level_b < *hi))
    throw Error(ErrorKind::Domain, "alpha_band_crossing: band levels outside the observed range");

  AlphaEstimate est;
  est.method = AlphaMethod::BandCrossing;
  est.band = std::make_pair(band.level_a, band.level_b);
  est.n_used = used;
  const std::size_t transits = count_band_transits(window, band.level_a, band.level_b);
  const double a_star = band.a_star();
  const double b_star = band.b_star();
  const double m = mean_excursion_time(a_star, b_star);
  const double rate = static_cast<double>(transits) / horizon;
  est.diagnostics["transits"] = static_cast<double>(transits);
  est.diagnostics["a_star"] = a_star;
  est.diagnostics["b_star"] = b_star;
  est.diagnostics["mean_excursion_time"] = m;
  est.diagnostics["alpha_uncorrected"] = m * rate;

  if (transits == 0) {
    est.status = EstimateStatus::InsufficientCrossings;
    est.value = 0.0;
    return est;
  }

  double alpha = m * rate;
  if (options.discrete_correction) {
    // Fixed point of alpha = m(a* - s(alpha), b* + s(alpha)) N / T; the map
    // is a contraction for realistic step sizes.
    for (int iter = 0; iter < 200; ++iter) {
      const double shift = kDiscreteMonitoringShift * std::sqrt(alpha * series.dt());
      const double next = mean_excursion_time(a_star - shift, b_star + shift) * rate;
      const bool done = std::abs(next - alpha) <= 1e-13 * next;
      alpha = next;
      if (done) break;
    }
    est.diagnostics["monitoring_shift"] = kDiscreteMonitoringShift * std::sqrt(alpha * series.dt());
  }
  est.value = alpha;
  return est;
}

}  // namespace tou
