#include "tou/ou_core.hpp"

#include <cmath>

#include "tou/errors.hpp"

namespace tou {

OUParams::OUParams(double alpha, double tau) : alpha_(alpha), tau_(tau) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error(ErrorKind::InvalidParameter, "OUParams: alpha must be > 0");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw Error(ErrorKind::InvalidParameter, "OUParams: tau must be > 0");
}

SamplePath::SamplePath(double t0, double dt, std::vector<double> values) : t0_(t0), dt_(dt), values_(std::move(values)) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorKind::InvalidParameter, "SamplePath: dt must be > 0");
  if (values_.empty()) throw Error(ErrorKind::EmptyInput, "SamplePath: no values");
}

double stationary_variance(const OUParams& p) noexcept { return p.tau() * p.tau() / (2.0 * p.alpha()); }

TransitionMoments transition_law(const OUParams& p, double elapsed, double z) {
  if (!(elapsed >= 0.0)) throw Error(ErrorKind::Domain, "transition_law: elapsed time must be >= 0");
  // -expm1(-2au) keeps the variance accurate for small u.
  return {z * std::exp(-p.alpha() * elapsed), stationary_variance(p) * -std::expm1(-2.0 * p.alpha() * elapsed)};
}

double autocorrelation(const OUParams& p, double lag) noexcept { return std::exp(-p.alpha() * std::abs(lag)); }

double increment_correlation(const OUParams& p, double delta, double k) {
  if (!(delta > 0.0)) throw Error(ErrorKind::Domain, "increment_correlation: delta must be > 0");
  const double a = p.alpha();
  const double num = 2.0 * std::exp(-a * k) - std::exp(-a * std::abs(k - delta)) - std::exp(-a * (k + delta));
  return num / (-2.0 * std::expm1(-a * delta));
}

namespace {

SamplePath ar1_path(const OUParams& p, std::size_t n, double dt, Rng& rng, double x0) {
  const double phi = std::exp(-p.alpha() * dt);
  const double step_sd = std::sqrt(stationary_variance(p) * -std::expm1(-2.0 * p.alpha() * dt));
  std::vector<double> x(n);
  x[0] = x0;
  for (std::size_t i = 1; i < n; ++i) x[i] = x[i - 1] * phi + step_sd * rng.normal();
  return SamplePath(0.0, dt, std::move(x));
}

void check_grid(std::size_t n, double dt) {
  if (n == 0) throw Error(ErrorKind::InvalidParameter, "simulate: n must be >= 1");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorKind::InvalidParameter, "simulate: dt must be > 0");
}

}  // namespace

SamplePath simulate_from(const OUParams& p, double x0, std::size_t n, double dt, RngSeed seed) {
  check_grid(n, dt);
  Rng rng(seed);
  return ar1_path(p, n, dt, rng, x0);
}

SamplePath simulate_stationary(const OUParams& p, std::size_t n, double dt, RngSeed seed) {
  check_grid(n, dt);
  // X_0 and the innovations share one stream.
  Rng rng(seed);
  const double x0 = std::sqrt(stationary_variance(p)) * rng.normal();
  return ar1_path(p, n, dt, rng, x0);
}

}  // namespace tou
