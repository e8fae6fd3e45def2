#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>

#include <json.hpp>

#include "tou/ou_core.hpp"
#include "tou/rng.hpp"
#include "tou/transform.hpp"

namespace tou {

enum class AlphaMethod { RankCorr, RankCorrIncrements, SignKnownMedian, SignEmpiricalMedian, BandCrossing };

enum class EstimateStatus {
  Ok,
  /// Spearman's rho <= 0: the log in the rank estimator is undefined.
  LogDomain,
  /// p̂ outside (1/4, 1/2), or an increment correlation outside the model range.
  OutOfDomain,
  /// No completed band transits; value is reported as 0.
  InsufficientCrossings,
};

const char* to_string(AlphaMethod method) noexcept;
const char* to_string(EstimateStatus status) noexcept;

struct AlphaEstimate {
  AlphaMethod method = AlphaMethod::RankCorr;
  std::optional<std::size_t> lag;
  std::optional<std::pair<double, double>> band;
  /// Empty when status is LogDomain or OutOfDomain.
  std::optional<double> value;
  EstimateStatus status = EstimateStatus::Ok;
  std::size_t n_used = 0;
  std::map<std::string, double> diagnostics;
  std::optional<RngSeed> provenance;
};

nlohmann::json to_json(const AlphaEstimate& e);

/// Rank-correlation estimator -(1/(k dt)) ln(2 sin(π ρ̂_S / 6)) with ρ̂_S over
/// the pairs (Y_t, Y_{t+k}). Requires at least k + 2 observations.
AlphaEstimate alpha_rank(const SamplePath& series, std::size_t k);

/// Rank-correlation estimator on lag-delta increments: solves
/// increment_correlation(alpha, delta, k) = 2 sin(π ρ̂_S / 6) for alpha, where
/// ρ̂_S is computed over (Δ_δ Y_t, Δ_δ Y_{t+k}). Needs 0 < k < delta.
AlphaEstimate alpha_rank_increments(const SamplePath& series, std::size_t k, std::size_t delta);

/// P(X_0 > 0, X_k > 0) = 1/4 + asin(e^{-alpha k}) / (2π).
double sign_prob(double alpha, double k);

/// g(x) = -ln sin(2π(x - 1/4)) on (1/4, 1/2); g(sign_prob(alpha, k)) = alpha k.
double g_link(double x);
/// g'(x) = -2π cot(2π(x - 1/4)).
double g_link_derivative(double x);

/// Midpoint of the two central order statistics for even n.
double empirical_median(std::span<const double> values);

/// Fraction of lag-k pairs with both values strictly above `level`.
double sign_pair_fraction(std::span<const double> values, std::size_t k, double level);

/// g(p̂⁰_k) / (k dt) with p̂⁰_k = fraction of pairs (Y_j, Y_{j+k}) above the
/// known stationary median.
AlphaEstimate alpha_sign_known_median(const SamplePath& series, std::size_t k, double median);

/// As alpha_sign_known_median with the empirical median of the series.
AlphaEstimate alpha_sign_empirical_median(const SamplePath& series, std::size_t k);

struct AsymptoticVariance {
  double value = 0.0;
  double std_error = 0.0;
};

/// v_k² = p_k(1 - p_k) + 2 Σ_{l=1}^{n_terms} (P(X_{k+l}>0, X_l>0, X_k>0, X_0>0) - p_k²)
/// for the stationary OU with unit time step. Four-dimensional orthant
/// probabilities use randomized lattice QMC with mc_size points; repeated
/// time points reduce to the closed-form trivariate case.
AsymptoticVariance asymptotic_variance(double alpha, std::size_t k, std::size_t n_terms, std::size_t mc_size,
                                       RngSeed seed);

/// Delta-method approximation v_k² g'(p_k)² / (n k²) for Var(α̂⁰_k).
double sign_estimator_variance(double alpha, std::size_t k, std::size_t n, double v2);

struct Theorem4Moments {
  double mean_p0 = 0.0;
  double var_p0 = 0.0;
  double mean_p = 0.0;
  /// Leading-order term only.
  double var_p = 0.0;
  bool var_p_asymptotic = true;
};

/// Moments of p̂⁰_k and p̂_k for n i.i.d. standard normals:
/// E p̂⁰ = 1/4, Var p̂⁰ = 5/(16 n_k) - k/(8 n_k²) with n_k = n - k,
/// E p̂ = 1/4 - 3/(4n) (odd n) or (n-2)/(4(n-1)) (even n), Var p̂ ≈ 1/(16 n).
Theorem4Moments theorem4_moments(std::size_t n, std::size_t k);

/// Levels A < B with their stationary CDF values 0 < F(A) < F(B) < 1.
struct BandSpec {
  double level_a = 0.0;
  double level_b = 0.0;
  double f_at_a = 0.0;
  double f_at_b = 0.0;

  BandSpec(double a, double b, double fa, double fb);

  /// Levels at the given F-values for a known model: A = h(σ Φ⁻¹(F(A))).
  static BandSpec from_model(const TransformSpec& h, const OUParams& p, double fa, double fb);
  /// Levels at empirical order statistics of the series, so the band moves
  /// with any strictly increasing transform of the data.
  static BandSpec from_quantiles(std::span<const double> values, double fa, double fb);

  /// Φ⁻¹(F(A)) / √2, the lower level for the unit OU process.
  [[nodiscard]] double a_star() const noexcept;
  [[nodiscard]] double b_star() const noexcept;
};

/// E T_{a,b}: mean time for the unit OU (dX = -X dt + dW) to reach a < b from b.
double mean_passage_down(double a, double b);
/// E T_{b,a}: mean time to reach b from a < b.
double mean_passage_up(double a, double b);

/// m_{a*,b*} = E T_{a*,b*} + E T_{b*,a*} by Gauss–Legendre quadrature.
double mean_excursion_time(double a_star, double b_star);
double mean_excursion_time(const BandSpec& band);

/// Completed B→A transits: a transit starts once the series has been above B
/// and completes at the first later value below A.
std::size_t count_band_transits(std::span<const double> values, double level_a, double level_b);

struct BandCrossingOptions {
  /// Widen (a*, b*) by 0.5826 √(alpha dt) on each side, solved jointly with
  /// alpha, to offset transits missed between observations.
  bool discrete_correction = true;
};

/// m_{a*,b*} N_{A,B}(T) / T over the observations with t - t0 <= horizon.
AlphaEstimate alpha_band_crossing(const SamplePath& series, const BandSpec& band, double horizon,
                                  BandCrossingOptions options = {});

}  // namespace tou
