#pragma once

#include <cstddef>
#include <vector>

#include "tou/rng.hpp"

namespace tou {

/// Drift and diffusion of dX = -alpha X dt + tau dW. Both strictly positive.
class OUParams {
 public:
  OUParams(double alpha, double tau);

  [[nodiscard]] double alpha() const noexcept { return alpha_; }
  [[nodiscard]] double tau() const noexcept { return tau_; }

 private:
  double alpha_;
  double tau_;
};

/// Uniformly spaced observations; times are t0 + i * dt.
class SamplePath {
 public:
  SamplePath(double t0, double dt, std::vector<double> values);

  [[nodiscard]] double t0() const noexcept { return t0_; }
  [[nodiscard]] double dt() const noexcept { return dt_; }
  [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] double time(std::size_t i) const noexcept { return t0_ + static_cast<double>(i) * dt_; }
  /// Time span covered, (size - 1) * dt.
  [[nodiscard]] double duration() const noexcept { return static_cast<double>(values_.size() - 1) * dt_; }

 private:
  double t0_;
  double dt_;
  std::vector<double> values_;
};

struct TransitionMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// tau² / (2 alpha).
double stationary_variance(const OUParams& p) noexcept;

/// Law of X_{s+u} given X_s = z: Normal(z e^{-alpha u}, sigma²(1 - e^{-2 alpha u})).
TransitionMoments transition_law(const OUParams& p, double elapsed, double z);

/// e^{-alpha |lag|}.
double autocorrelation(const OUParams& p, double lag) noexcept;

/// Correlation of (X_t - X_{t-delta}, X_{t+k} - X_{t+k-delta}) in the stationary process.
double increment_correlation(const OUParams& p, double delta, double k);

/// Exact AR(1) sampling of the stationary process: X_0 ~ N(0, sigma²) and
/// X_{i+1} = X_i e^{-alpha dt} + sqrt(sigma²(1 - e^{-2 alpha dt})) Z_i.
SamplePath simulate_stationary(const OUParams& p, std::size_t n, double dt, RngSeed seed);

/// Same recursion, started from a fixed x0 instead of the stationary law.
SamplePath simulate_from(const OUParams& p, double x0, std::size_t n, double dt, RngSeed seed);

}  // namespace tou
