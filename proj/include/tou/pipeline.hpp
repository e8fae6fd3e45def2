#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tou/ou_core.hpp"
#include "tou/rng.hpp"
#include "tou/tail_stats.hpp"
#include "tou/transform.hpp"

namespace tou {

using Date = std::chrono::year_month_day;

/// "YYYY-MM-DD"; nullopt when malformed or not a calendar date.
std::optional<Date> parse_date(std::string_view text);
std::string format_date(const Date& d);

/// Dated positive prices with strictly increasing dates.
class PriceSeries {
 public:
  PriceSeries(std::vector<Date> dates, std::vector<double> prices);

  [[nodiscard]] const std::vector<Date>& dates() const noexcept { return dates_; }
  [[nodiscard]] const std::vector<double>& prices() const noexcept { return prices_; }
  [[nodiscard]] std::size_t size() const noexcept { return prices_.size(); }
  /// Z_t = ln S_t on a unit time grid (trading-day gaps count as one step).
  [[nodiscard]] SamplePath log_prices() const;

 private:
  std::vector<Date> dates_;
  std::vector<double> prices_;
};

/// Two-column `date,price` CSV. A first line whose price field is not a
/// number is taken as a header. Blank lines are skipped. Throws
/// ParseError(line) for malformed rows, non-positive prices or out-of-order
/// dates, Error(EmptyInput) when no data rows remain and Error(Io) when the
/// file cannot be opened.
PriceSeries read_csv(std::istream& in);
PriceSeries load_csv(const std::filesystem::path& path);

void write_csv(std::ostream& out, const PriceSeries& series);

/// Δ_δ Z_t = ln S_t - ln S_{t-δ}, t = δ..N-1; the first output time is t0 + δ dt.
SamplePath log_returns(const PriceSeries& series, std::size_t delta);
/// Z_t - Z_{t-δ} for a series that already holds log levels.
SamplePath log_returns(const SamplePath& levels, std::size_t delta);

/// Consecutive non-overlapping blocks of `block_len` points; a shorter tail
/// block is dropped.
std::vector<SamplePath> split_blocks(const SamplePath& series, std::size_t block_len);

enum class ProfileMode { Levels, Increments };

struct ProfilePoint {
  std::size_t k = 0;
  double rho_s = 0.0;
  std::size_t n_pairs = 0;
  /// Blocks contributing to a block-averaged value; 0 for pooled values.
  std::size_t n_blocks = 0;
};

struct SpearmanProfile {
  ProfileMode mode = ProfileMode::Levels;
  std::size_t delta = 0;
  std::optional<std::size_t> block_len;
  /// Levels with blocking: each point is the average of per-block values.
  bool block_averaged = false;
  std::vector<ProfilePoint> points;
  /// Rows follow `points`, columns follow the blocks (NaN where a block was degenerate).
  std::vector<std::vector<double>> per_block;
  std::vector<std::string> warnings;
};

/// Spearman's rho of (W_t, W_{t+k}) for k = 0..k_max, with W the levels or the
/// lag-delta increments. Levels with a block length are computed within
/// blocks and averaged; increments always use the pooled sample. Lags with
/// fewer than 3 pairs (or degenerate data) are omitted and listed in warnings.
SpearmanProfile spearman_profile(const SamplePath& series, std::size_t k_max, ProfileMode mode, std::size_t delta = 0,
                                 std::optional<std::size_t> block_len = std::nullopt);

nlohmann::json to_json(const SpearmanProfile& profile);

struct AnalysisConfig {
  std::vector<std::size_t> delta_list = {1, 5, 10, 20};
  std::size_t k_max = 50;
  std::size_t block_len = 100;
  /// Upper-tail fractions for the log-log fits.
  std::vector<double> tail_fractions = {0.05};
  std::size_t gof_stride = 10;
  /// Lag between the two coordinates of the copula pairs.
  std::size_t gof_offset = 5;
  std::size_t n_bootstrap = 100;
  /// R² below this marks a log-log fit as not power-law like.
  double r2_threshold = 0.98;
  RngSeed seed{1, 0};

  /// Throws Error(InvalidParameter) on a violated invariant.
  void validate() const;
  [[nodiscard]] nlohmann::json to_json() const;
  /// Missing keys keep their defaults; unknown keys are ignored.
  static AnalysisConfig from_json(const nlohmann::json& j);
};

struct TailCell {
  std::optional<double> value;
  std::size_t k_used = 0;
  std::optional<double> r_squared;
  bool poor_fit = false;
  /// Set instead of `value` when the estimator failed on this cell.
  std::optional<std::string> error;
};

struct TailRow {
  std::size_t delta = 0;
  Side side = Side::Right;
  std::size_t n = 0;
  /// One entry per configured tail fraction.
  std::vector<std::pair<double, TailCell>> loglog;
  TailCell hill2;
  TailCell hill5;
  std::vector<TailPlotPoint> plot;
};

struct TailReport {
  std::vector<TailRow> rows;
  double r2_threshold = 0.0;
};

/// For each δ and side: log-log least squares slopes and Hill estimates at
/// 2% and 5% on Δ_δ of the log levels. Estimator failures are recorded per cell.
TailReport run_tail_report(const SamplePath& log_levels, const AnalysisConfig& config);

nlohmann::json to_json(const TailReport& report);

struct SimulatedDataset {
  SamplePath x;
  SamplePath y;
  /// Indices where |h(x)| hit the saturation magnitude.
  std::vector<std::size_t> saturated;
  nlohmann::json metadata;
};

/// Y_t = h(X_t) on a stationary exact OU path.
SimulatedDataset simulate_dataset(const OUParams& params, const TransformSpec& h, std::size_t n, double dt,
                                  RngSeed seed);

/// Synthetic daily price series exp(Y_t) dated on consecutive weekdays from `start`.
PriceSeries synthetic_prices(const SamplePath& y, Date start);

}  // namespace tou
