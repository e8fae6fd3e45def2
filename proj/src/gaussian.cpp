#include "tou/gaussian.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "tou/errors.hpp"
#include "tou/quadrature.hpp"

namespace tou {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double poly(const double* c, int n, double x) {
  double r = c[n - 1];
  for (int i = n - 2; i >= 0; --i) r = r * x + c[i];
  return r;
}

}  // namespace

double norm_pdf(double x) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double norm_cdf(double x) noexcept { return 0.5 * std::erfc(-x * kInvSqrt2); }

double norm_sf(double x) noexcept { return 0.5 * std::erfc(x * kInvSqrt2); }

double norm_quantile(double p) noexcept {
  // Wichura (1988), Algorithm AS 241, PPND16.
  static constexpr double a[] = {3.3871328727963666080e0, 1.3314166789178437745e+2, 1.9715909503065514427e+3,
                                 1.3731693765509461125e+4, 4.5921953931549871457e+4, 6.7265770927008700853e+4,
                                 3.3430575583588128105e+4, 2.5090809287301226727e+3};
  static constexpr double b[] = {1.0, 4.2313330701600911252e+1, 6.8718700749205790830e+2, 5.3941960214247511077e+3,
                                 2.1213794301586595867e+4, 3.9307895800092710610e+4, 2.8729085735721942674e+4,
                                 5.2264952788528545610e+3};
  static constexpr double c[] = {1.42343711074968357734e0,  4.63033784615654529590e0,  5.76949722146069140550e0,
                                 3.64784832476320460504e0,  1.27045825245236838258e0,  2.41780725177450611770e-1,
                                 2.27238449892691845833e-2, 7.74545014278341407640e-4};
  static constexpr double d[] = {1.0,
                                 2.05319162663775882187e0,
                                 1.67638483018380384940e0,
                                 6.89767334985100004550e-1,
                                 1.48103976427480074590e-1,
                                 1.51986665636164571966e-2,
                                 5.47593808499534494600e-4,
                                 1.05075007164441684324e-9};
  static constexpr double e[] = {6.65790464350110377720e0,  5.46378491116411436990e0,  1.78482653991729133580e0,
                                 2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
                                 2.71155556874348757815e-5, 2.01033439929228813265e-7};
  static constexpr double f[] = {1.0,
                                 5.99832206555887937690e-1,
                                 1.36929880922735805310e-1,
                                 1.48753612908506148525e-2,
                                 7.86869131145613259100e-4,
                                 1.84631831751005468180e-5,
                                 1.42151175831644588870e-7,
                                 2.04426310338993978564e-15};

  if (!(p > 0.0)) return p == 0.0 ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::quiet_NaN();
  if (!(p < 1.0)) return p == 1.0 ? std::numeric_limits<double>::infinity() : std::numeric_limits<double>::quiet_NaN();

  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * poly(a, 8, r) / poly(b, 8, r);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = poly(c, 8, r) / poly(d, 8, r);
  } else {
    r -= 5.0;
    val = poly(e, 8, r) / poly(f, 8, r);
  }
  return q < 0.0 ? -val : val;
}

double bvn_cdf(double x, double y, double rho) {
  if (!(std::abs(rho) < 1.0)) throw Error(ErrorKind::Domain, "bvn_cdf: |rho| must be < 1");
  if (std::isnan(x) || std::isnan(y)) return std::numeric_limits<double>::quiet_NaN();
  if (x == -std::numeric_limits<double>::infinity() || y == -std::numeric_limits<double>::infinity()) return 0.0;
  if (x == std::numeric_limits<double>::infinity()) return norm_cdf(y);
  if (y == std::numeric_limits<double>::infinity()) return norm_cdf(x);

  const double base = norm_cdf(x) * norm_cdf(y);
  if (rho == 0.0) return base;

  const double theta_end = std::asin(rho);
  const double xx_yy = x * x + y * y;
  const double two_xy = 2.0 * x * y;
  auto integrand = [&](double theta) {
    const double c = std::cos(theta);
    return std::exp(-(xx_yy - two_xy * std::sin(theta)) / (2.0 * c * c));
  };

  // Panels graded geometrically toward theta_end, where the integrand
  // varies fastest as |rho| -> 1.
  const auto& rule = gauss_legendre(20);
  constexpr int kPanels = 12;
  double total = 0.0;
  double lo = 0.0;
  for (int p = 0; p < kPanels; ++p) {
    const double hi = p + 1 == kPanels ? theta_end : theta_end * (1.0 - std::ldexp(1.0, -(p + 1)));
    const double half = 0.5 * (hi - lo);
    const double mid = lo + half;
    double panel = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) panel += rule.weights[i] * integrand(mid + half * rule.nodes[i]);
    total += half * panel;
    lo = hi;
  }
  const double value = base + total / (2.0 * std::numbers::pi);
  return std::clamp(value, 0.0, 1.0);
}

double orthant2(double rho) noexcept { return 0.25 + std::asin(rho) / (2.0 * std::numbers::pi); }

double orthant3(double r12, double r13, double r23) noexcept {
  return 0.125 + (std::asin(r12) + std::asin(r13) + std::asin(r23)) / (4.0 * std::numbers::pi);
}

OrthantEstimate orthant_probability_qmc(std::span<const double> correlation, std::size_t dim, std::size_t points,
                                        Rng& rng, std::size_t shifts) {
  if (dim == 0 || correlation.size() != dim * dim) throw Error(ErrorKind::InvalidParameter, "orthant: bad matrix");
  if (dim == 1) return {0.5, 0.0};
  if (shifts < 2) shifts = 2;

  // Cholesky factor, lower triangular.
  std::vector<double> chol(dim * dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = correlation[i * dim + j];
      for (std::size_t k = 0; k < j; ++k) s -= chol[i * dim + k] * chol[j * dim + k];
      if (i == j) {
        if (!(s > 0.0)) throw Error(ErrorKind::InvalidParameter, "orthant: correlation matrix not positive definite");
        chol[i * dim + i] = std::sqrt(s);
      } else {
        chol[i * dim + j] = s / chol[j * dim + j];
      }
    }
  }

  // Richtmyer generators sqrt(prime) mod 1.
  static constexpr std::array<double, 12> kPrimes = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  if (dim - 1 > kPrimes.size()) throw Error(ErrorKind::InvalidParameter, "orthant: dimension too large");
  std::vector<double> generator(dim - 1);
  for (std::size_t i = 0; i + 1 < dim; ++i) generator[i] = std::fmod(std::sqrt(kPrimes[i]), 1.0);

  const std::size_t per_shift = std::max<std::size_t>(1, points / shifts);
  std::vector<double> shift(dim - 1);
  std::vector<double> z(dim);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t s = 0; s < shifts; ++s) {
    for (auto& v : shift) v = rng.uniform();
    double shift_total = 0.0;
    for (std::size_t j = 1; j <= per_shift; ++j) {
      // First coordinate: P(Z1 > 0) = 1/2 with the upper limit at +inf.
      double f = 0.5;
      double lower = 0.5;  // Φ(lower limit) for the current coordinate
      for (std::size_t i = 1; i < dim; ++i) {
        double w = std::fmod(static_cast<double>(j) * generator[i - 1] + shift[i - 1], 1.0);
        w = std::abs(2.0 * w - 1.0);  // baker's transform
        const double u = lower + w * (1.0 - lower);
        z[i - 1] = norm_quantile(std::clamp(u, 1e-300, 1.0 - 1e-16));
        double mean = 0.0;
        for (std::size_t k = 0; k < i; ++k) mean += chol[i * dim + k] * z[k];
        lower = norm_cdf(-mean / chol[i * dim + i]);
        f *= 1.0 - lower;
        if (f == 0.0) break;
      }
      shift_total += f;
    }
    const double avg = shift_total / static_cast<double>(per_shift);
    sum += avg;
    sum_sq += avg * avg;
  }
  const auto m = static_cast<double>(shifts);
  const double mean = sum / m;
  const double var = std::max(0.0, (sum_sq - m * mean * mean) / (m - 1.0));
  return {mean, std::sqrt(var / m)};
}

}  // namespace tou
