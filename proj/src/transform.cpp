#include "tou/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tou/errors.hpp"
#include "tou/gaussian.hpp"

namespace tou {

namespace {

constexpr double kPaperBPlus = 0.2;
constexpr double kPaperBMinus = 0.1;
constexpr double kContinuityTolerance = 1e-9;

Applied saturate(double sign, double log_magnitude, double saturation, double finite_value) {
  if (log_magnitude >= std::log(saturation) || !std::isfinite(finite_value)) return {sign * saturation, true};
  if (std::abs(finite_value) >= saturation) return {sign * saturation, true};
  return {finite_value, false};
}

}  // namespace

const char* to_string(Side side) noexcept { return side == Side::Left ? "left" : "right"; }

Side side_from_string(const std::string& name) {
  if (name == "left" || name == "Left") return Side::Left;
  if (name == "right" || name == "Right") return Side::Right;
  throw Error(ErrorKind::InvalidParameter, "unknown side '" + name + "'");
}

const char* to_string(TailKind kind) noexcept {
  switch (kind) {
    case TailKind::Stationary: return "stationary";
    case TailKind::Transition: return "transition";
    case TailKind::Increment: return "increment";
  }
  return "?";
}

TransformSpec::TransformSpec(TransformVariant variant, std::optional<SplineParams> spline, double sigma_ref,
                             double saturation)
    : variant_(variant), spline_(spline), sigma_ref_(sigma_ref), saturation_(saturation) {
  validate();
}

TransformSpec TransformSpec::paper_example(double saturation) {
  return TransformSpec(TransformVariant::PaperExample, std::nullopt, 1.0, saturation);
}

TransformSpec TransformSpec::spline(const SplineParams& params, double sigma_ref, double saturation) {
  return TransformSpec(TransformVariant::Spline, params, sigma_ref, saturation);
}

TransformSpec TransformSpec::continuous_spline(double a2, double a3, double b_plus, double b_minus, double x1,
                                               double x2, double sigma_ref, double saturation) {
  SplineParams p;
  p.a2 = a2;
  p.a3 = a3;
  p.b_plus = b_plus;
  p.b_minus = b_minus;
  p.x1 = x1;
  p.x2 = x2;
  p.a1 = -(a2 + a3 * x1) / std::exp(b_minus * x1 * x1);
  p.a4 = (a2 + a3 * x2) / std::exp(b_plus * x2 * x2);
  return spline(p, sigma_ref, saturation);
}

double TransformSpec::b_plus() const noexcept { return spline_ ? spline_->b_plus : kPaperBPlus; }
double TransformSpec::b_minus() const noexcept { return spline_ ? spline_->b_minus : kPaperBMinus; }

void TransformSpec::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::InvalidParameter, "TransformSpec: " + msg); };
  if (!(saturation_ > 1.0) || !std::isfinite(saturation_)) fail("saturation must be finite and > 1");
  if (!(sigma_ref_ > 0.0) || !std::isfinite(sigma_ref_)) fail("sigma_ref must be > 0");
  if (spline_) {
    const auto& s = *spline_;
    for (double v : {s.a1, s.a2, s.a3, s.a4, s.b_plus, s.b_minus, s.x1, s.x2})
      if (!std::isfinite(v)) fail("non-finite spline parameter");
    if (!(s.a1 > 0.0) || !(s.a4 > 0.0)) fail("a1 and a4 must be > 0");
    if (!(s.a3 > 0.0)) fail("a3 must be > 0");
    if (!(s.b_plus > 0.0) || !(s.b_minus > 0.0)) fail("b_plus and b_minus must be > 0");
    if (!(s.x1 < s.x2)) fail("x1 must be < x2");
    // exp(b x²) pieces are increasing only on x <= x1 < 0 (left) and x > x2 > 0 (right).
    if (!(s.x1 < 0.0)) fail("x1 must be < 0 for the left piece to increase");
    if (!(s.x2 > 0.0)) fail("x2 must be > 0 for the right piece to increase");
    const double left_gap = -s.a1 * std::exp(s.b_minus * s.x1 * s.x1) - (s.a2 + s.a3 * s.x1);
    const double right_gap = s.a4 * std::exp(s.b_plus * s.x2 * s.x2) - (s.a2 + s.a3 * s.x2);
    if (!(std::abs(left_gap) <= kContinuityTolerance)) fail("discontinuous at x1");
    if (!(std::abs(right_gap) <= kContinuityTolerance)) fail("discontinuous at x2");
  }
  // Certify monotonicity on a grid of +-10 reference standard deviations.
  constexpr int kGrid = 4000;
  const double span = 10.0 * sigma_ref_;
  Applied prev = apply(-span);
  for (int i = 1; i <= kGrid; ++i) {
    const Applied cur = apply(-span + 2.0 * span * i / kGrid);
    if (!(cur.value > prev.value) && !(cur.saturated && prev.saturated && cur.value == prev.value))
      fail("not strictly increasing on the verification grid");
    prev = cur;
  }
}

Applied TransformSpec::apply(double x) const noexcept {
  if (std::isnan(x)) return {x, false};
  if (variant_ == TransformVariant::PaperExample) {
    if (x == 0.0) return {0.0, false};
    const double sign = x > 0.0 ? 1.0 : -1.0;
    const double b = x > 0.0 ? kPaperBPlus : kPaperBMinus;
    const double e = b * x * x;
    const double value = 2.0 * std::expm1(e) * sign + x;
    return saturate(sign, e + std::log(2.0), saturation_, value);
  }
  const auto& s = *spline_;
  if (x <= s.x1) {
    const double e = s.b_minus * x * x;
    return saturate(-1.0, e + std::log(s.a1), saturation_, -s.a1 * std::exp(e));
  }
  if (x <= s.x2) {
    const double value = s.a2 + s.a3 * x;
    return saturate(value < 0 ? -1.0 : 1.0, -std::numeric_limits<double>::infinity(), saturation_, value);
  }
  const double e = s.b_plus * x * x;
  return saturate(1.0, e + std::log(s.a4), saturation_, s.a4 * std::exp(e));
}

double TransformSpec::derivative(double x) const noexcept {
  if (variant_ == TransformVariant::PaperExample) {
    const double b = x > 0.0 ? kPaperBPlus : kPaperBMinus;
    return 4.0 * b * std::abs(x) * std::exp(b * x * x) + 1.0;
  }
  const auto& s = *spline_;
  if (x <= s.x1) return -2.0 * s.a1 * s.b_minus * x * std::exp(s.b_minus * x * x);
  if (x <= s.x2) return s.a3;
  return 2.0 * s.a4 * s.b_plus * x * std::exp(s.b_plus * x * x);
}

double TransformSpec::invert(double y) const {
  if (!std::isfinite(y) || std::abs(y) >= saturation_)
    throw Error(ErrorKind::Range, "TransformSpec::invert: y outside the representable range of h");
  const double tol = std::max(1e-10, 1e-12 * std::abs(y));

  // Bracket by geometric expansion from 0; apply() saturates instead of
  // overflowing, so the loops terminate.
  double lo = -1.0;
  double hi = 1.0;
  while (apply(hi).value < y) {
    lo = hi;
    hi *= 2.0;
  }
  while (apply(lo).value > y) {
    hi = lo;
    lo *= 2.0;
  }

  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 500; ++iter) {
    const double f = apply(x).value - y;
    if (std::abs(f) <= tol) return x;
    if (f < 0.0)
      lo = x;
    else
      hi = x;
    const double d = derivative(x);
    double next = x - f / d;
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    if (next == x || hi <= std::nextafter(lo, hi)) break;
    x = next;
  }
  // Bracket exhausted at double resolution: return the closer endpoint.
  const double flo = std::abs(apply(lo).value - y);
  const double fhi = std::abs(apply(hi).value - y);
  const double fx = std::abs(apply(x).value - y);
  if (fx <= flo && fx <= fhi) return x;
  return flo <= fhi ? lo : hi;
}

TransformSpec TransformSpec::rescaled(double scale) const {
  if (!spline_) throw Error(ErrorKind::InvalidParameter, "rescaled: only spline transforms can be rescaled");
  if (!(scale > 0.0)) throw Error(ErrorKind::InvalidParameter, "rescaled: scale must be > 0");
  SplineParams s = *spline_;
  s.b_plus *= scale * scale;
  s.b_minus *= scale * scale;
  s.a3 *= scale;
  s.x1 /= scale;
  s.x2 /= scale;
  return spline(s, sigma_ref_ / scale, saturation_);
}

TransformSpec TransformSpec::mirrored() const {
  if (!spline_) throw Error(ErrorKind::InvalidParameter, "mirrored: only spline transforms can be mirrored");
  const auto& s = *spline_;
  SplineParams m;
  m.a1 = s.a4;
  m.a4 = s.a1;
  m.b_minus = s.b_plus;
  m.b_plus = s.b_minus;
  m.a2 = -s.a2;
  m.a3 = s.a3;
  m.x1 = -s.x2;
  m.x2 = -s.x1;
  return spline(m, sigma_ref_, saturation_);
}

nlohmann::json TransformSpec::to_json() const {
  nlohmann::json j;
  if (variant_ == TransformVariant::PaperExample) {
    j["variant"] = "PaperExample";
  } else {
    const auto& s = *spline_;
    j = {{"variant", "Spline"}, {"a1", s.a1}, {"a2", s.a2}, {"a3", s.a3}, {"a4", s.a4}, {"b_plus", s.b_plus},
         {"b_minus", s.b_minus}, {"x1", s.x1}, {"x2", s.x2}, {"sigma_ref", sigma_ref_}};
  }
  j["saturation"] = saturation_;
  return j;
}

TransformSpec TransformSpec::from_json(const nlohmann::json& j) {
  try {
    const auto variant = j.at("variant").get<std::string>();
    const double saturation = j.value("saturation", kDefaultSaturation);
    if (variant == "PaperExample") return paper_example(saturation);
    if (variant != "Spline") throw Error(ErrorKind::InvalidParameter, "unknown transform variant '" + variant + "'");
    SplineParams s;
    s.a1 = j.at("a1").get<double>();
    s.a2 = j.at("a2").get<double>();
    s.a3 = j.at("a3").get<double>();
    s.a4 = j.at("a4").get<double>();
    s.b_plus = j.at("b_plus").get<double>();
    s.b_minus = j.at("b_minus").get<double>();
    s.x1 = j.at("x1").get<double>();
    s.x2 = j.at("x2").get<double>();
    return spline(s, j.value("sigma_ref", 1.0), saturation);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidParameter, std::string("transform json: ") + e.what());
  }
}

MarginalCdf marginal_cdf(const TransformSpec& h, const OUParams& p, double y) {
  try {
    return {norm_cdf(h.invert(y) / std::sqrt(stationary_variance(p))), false};
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Range || std::isnan(y)) throw;
    return {y > 0.0 ? 1.0 : 0.0, true};
  }
}

namespace {

double side_b(const TransformSpec& h, Side side) {
  const double b = side == Side::Right ? h.b_plus() : h.b_minus();
  if (!(b > 0.0)) throw Error(ErrorKind::UnsupportedSide, "transform has no exp(b x^2) growth on this side");
  return b;
}

}  // namespace

TailIndexReport stationary_tail_index(const TransformSpec& h, const OUParams& p, Side side) {
  const double b = side_b(h, side);
  return {side, p.alpha() / (b * p.tau() * p.tau()), TailKind::Stationary, std::nullopt};
}

TailIndexReport transition_tail_index(const TransformSpec& h, const OUParams& p, double elapsed, Side side) {
  if (!(elapsed > 0.0)) throw Error(ErrorKind::Domain, "transition_tail_index: elapsed must be > 0");
  const double b = side_b(h, side);
  const double shrink = -std::expm1(-2.0 * p.alpha() * elapsed);
  return {side, p.alpha() / (b * p.tau() * p.tau() * shrink), TailKind::Transition, elapsed};
}

TailIndexReport increment_tail_index(const TransformSpec& h, const OUParams& p) {
  // h(-x) = o(h(x)) iff b+ > b- for this family (equal exponents leave a
  // constant ratio a1/a4, which is not o(1)).
  const double bp = h.b_plus();
  const double bm = h.b_minus();
  if (bp == bm) throw Error(ErrorKind::IndeterminateDomination, "increment_tail_index: neither tail of h dominates");
  const Side dominant = bp > bm ? Side::Right : Side::Left;
  auto report = stationary_tail_index(h, p, dominant);
  report.side = Side::Right;
  report.kind = TailKind::Increment;
  return report;
}

}  // namespace tou
