#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "tou/transform.hpp"

namespace tou {

enum class TailMethod { Hill, LogLogLS };

const char* to_string(TailMethod method) noexcept;

struct TailEstimate {
  Side side = Side::Right;
  TailMethod method = TailMethod::Hill;
  double index = 0.0;
  /// Percentage of the sample used, 100 k / n.
  double fraction_pct = 0.0;
  std::size_t k_used = 0;
  /// Coefficient of determination of the log-log line (LogLogLS only).
  std::optional<double> r_squared;
};

nlohmann::json to_json(const TailEstimate& e);

/// Hill estimate of the tail index from the top k = max(2, floor(p_pct n / 100))
/// order statistics of the side-selected data (Left negates the sample):
///   1/index = (1/(k-1)) sum_{i<k} ln(V_{i,n} / V_{k,n}).
///
/// Throws Error(InsufficientData) when k < 2 or k > n, and
/// Error(NonpositiveThreshold) when V_{k,n} <= 0.
TailEstimate hill_estimator(std::span<const double> data, Side side, double p_pct);

/// Hill estimate with an explicit number of order statistics, 2 <= k <= n.
TailEstimate hill_estimator_k(std::span<const double> data, Side side, std::size_t k);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares y = intercept + slope x. Throws
/// Error(SingularFit) when the x values have no spread.
LineFit least_squares_line(std::span<const double> x, std::span<const double> y);

/// Negated least-squares slope of (ln v_i, ln(i / n)) over the top
/// floor(fraction n) side-selected values (descending rank i, positive values
/// only). Requires at least `min_points` points.
TailEstimate loglog_tail_fit(std::span<const double> data, Side side, double fraction, std::size_t min_points = 10);

/// Fraction of observations > x (Right) or < -x (Left).
double empirical_tail(std::span<const double> data, double x, Side side);

struct TailPlotPoint {
  double ln_value = 0.0;
  double ln_tail_prob = 0.0;
};

/// (ln v_i, ln(i / n)) for every positive side-selected value, in descending
/// order of v. Plot data for log-log tail curves.
std::vector<TailPlotPoint> tail_plot_points(std::span<const double> data, Side side);

}  // namespace tou
