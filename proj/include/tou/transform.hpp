#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "tou/ou_core.hpp"

namespace tou {

enum class Side { Left, Right };

const char* to_string(Side side) noexcept;
Side side_from_string(const std::string& name);

enum class TransformVariant { Spline, PaperExample };

/// Three-piece transform
///   -a1 exp(b_minus x²)   for x <= x1
///    a2 + a3 x            for x1 < x <= x2
///    a4 exp(b_plus x²)    for x > x2
struct SplineParams {
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 1.0;
  double a4 = 0.0;
  double b_plus = 0.0;
  double b_minus = 0.0;
  double x1 = 0.0;
  double x2 = 0.0;
};

/// Value of h at a point; `saturated` is set when |h(x)| exceeded the
/// saturation magnitude and the value was clamped to it.
struct Applied {
  double value = 0.0;
  bool saturated = false;
};

inline constexpr double kDefaultSaturation = 1e300;

/// Strictly increasing transform h with exp(b± x²) tail growth.
///
/// Immutable after construction; every constructor validates continuity and
/// monotonicity and throws `Error(InvalidParameter)` on failure.
class TransformSpec {
 public:
  /// h(x) = 2(exp((3 + sign x) x² / 20) - 1) sign x + x, so b+ = 0.2, b- = 0.1.
  static TransformSpec paper_example(double saturation = kDefaultSaturation);

  /// Spline with all parameters given. Continuity at x1, x2 must hold to
  /// 1e-9 and monotonicity is certified on [-10 sigma_ref, 10 sigma_ref].
  static TransformSpec spline(const SplineParams& params, double sigma_ref = 1.0,
                              double saturation = kDefaultSaturation);

  /// Spline whose outer coefficients a1, a4 are solved from continuity.
  static TransformSpec continuous_spline(double a2, double a3, double b_plus, double b_minus, double x1, double x2,
                                         double sigma_ref = 1.0, double saturation = kDefaultSaturation);

  [[nodiscard]] TransformVariant variant() const noexcept { return variant_; }
  [[nodiscard]] double b_plus() const noexcept;
  [[nodiscard]] double b_minus() const noexcept;
  [[nodiscard]] double saturation() const noexcept { return saturation_; }
  [[nodiscard]] double sigma_ref() const noexcept { return sigma_ref_; }
  [[nodiscard]] const std::optional<SplineParams>& spline_params() const noexcept { return spline_; }

  [[nodiscard]] Applied apply(double x) const noexcept;
  /// apply(x).value
  [[nodiscard]] double operator()(double x) const noexcept { return apply(x).value; }
  [[nodiscard]] double derivative(double x) const noexcept;

  /// x with |h(x) - y| <= max(1e-10, 1e-12 |y|). Throws Error(Range) when
  /// |y| reaches the saturation magnitude or is not finite.
  [[nodiscard]] double invert(double y) const;

  /// x ↦ h(scale · x); only for the spline variant. With scale = tau this
  /// moves the diffusion coefficient into the transform.
  [[nodiscard]] TransformSpec rescaled(double scale) const;

  /// Spline with tails swapped: x ↦ -h(-x).
  [[nodiscard]] TransformSpec mirrored() const;

  [[nodiscard]] nlohmann::json to_json() const;
  static TransformSpec from_json(const nlohmann::json& j);

 private:
  TransformSpec(TransformVariant variant, std::optional<SplineParams> spline, double sigma_ref, double saturation);
  void validate() const;

  TransformVariant variant_;
  std::optional<SplineParams> spline_;
  double sigma_ref_;
  double saturation_;
};

enum class TailKind { Stationary, Transition, Increment };

const char* to_string(TailKind kind) noexcept;

struct TailIndexReport {
  Side side = Side::Right;
  double index = 0.0;
  TailKind kind = TailKind::Stationary;
  std::optional<double> elapsed;
};

struct MarginalCdf {
  double value = 0.0;
  /// Set when h⁻¹(y) was out of range and the value was clamped to 0 or 1.
  bool clamped = false;
};

/// F(y) = Φ(h⁻¹(y) / sigma).
MarginalCdf marginal_cdf(const TransformSpec& h, const OUParams& p, double y);

/// alpha / (b_side tau²).
TailIndexReport stationary_tail_index(const TransformSpec& h, const OUParams& p, Side side);

/// alpha / (b_side tau² (1 - e^{-2 alpha elapsed})).
TailIndexReport transition_tail_index(const TransformSpec& h, const OUParams& p, double elapsed, Side side);

/// Right-tail index of Y_t - Y_s: the stationary index of whichever tail of
/// h dominates. Throws Error(IndeterminateDomination) when b+ == b-.
TailIndexReport increment_tail_index(const TransformSpec& h, const OUParams& p);

}  // namespace tou
