#include "tou/tail_stats.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "tou/errors.hpp"

namespace tou {

namespace {

/// Side-selected values sorted descending (stable, so ties keep input order).
std::vector<double> descending(std::span<const double> data, Side side) {
  std::vector<double> v(data.begin(), data.end());
  if (side == Side::Left)
    for (auto& x : v) x = -x;
  std::stable_sort(v.begin(), v.end(), std::greater<>());
  return v;
}

}  // namespace

const char* to_string(TailMethod method) noexcept { return method == TailMethod::Hill ? "hill" : "loglog_ls"; }

nlohmann::json to_json(const TailEstimate& e) {
  nlohmann::json j = {{"side", to_string(e.side)},
                      {"method", to_string(e.method)},
                      {"index", e.index},
                      {"fraction_pct", e.fraction_pct},
                      {"k_used", e.k_used}};
  if (e.r_squared) j["r_squared"] = *e.r_squared;
  return j;
}

TailEstimate hill_estimator(std::span<const double> data, Side side, double p_pct) {
  if (!(p_pct > 0.0 && p_pct < 100.0)) throw Error(ErrorKind::Domain, "hill_estimator: p_pct must be in (0, 100)");
  const std::size_t n = data.size();
  const auto k = std::max<std::size_t>(2, static_cast<std::size_t>(std::floor(p_pct * static_cast<double>(n) / 100.0)));
  return hill_estimator_k(data, side, k);
}

TailEstimate hill_estimator_k(std::span<const double> data, Side side, std::size_t k) {
  const std::size_t n = data.size();
  if (k < 2 || k > n) throw Error(ErrorKind::InsufficientData, "hill_estimator: need 2 <= k <= n");

  std::vector<double> v(data.begin(), data.end());
  if (side == Side::Left)
    for (auto& x : v) x = -x;
  // Only the top k order statistics are needed.
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k - 1), v.end(), std::greater<>());
  const double threshold = v[k - 1];
  if (!(threshold > 0.0)) throw Error(ErrorKind::NonpositiveThreshold, "hill_estimator: V_{k,n} <= 0");

  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < k; ++i) sum += std::log(v[i] / threshold);
  if (!(sum > 0.0)) throw Error(ErrorKind::InsufficientData, "hill_estimator: top order statistics are all equal");

  TailEstimate est;
  est.side = side;
  est.method = TailMethod::Hill;
  est.index = static_cast<double>(k - 1) / sum;
  est.fraction_pct = 100.0 * static_cast<double>(k) / static_cast<double>(n);
  est.k_used = k;
  return est;
}

LineFit least_squares_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(ErrorKind::InsufficientData, "least squares: need >= 2 points");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (!(sxx > 0.0)) throw Error(ErrorKind::SingularFit, "least squares: x values have no spread");
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

TailEstimate loglog_tail_fit(std::span<const double> data, Side side, double fraction, std::size_t min_points) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw Error(ErrorKind::Domain, "loglog_tail_fit: fraction must be in (0, 1)");
  const std::size_t n = data.size();
  const auto m = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
  const auto v = descending(data, side);

  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < m && i < v.size() && v[i] > 0.0; ++i) {
    xs.push_back(std::log(v[i]));
    ys.push_back(std::log(static_cast<double>(i + 1) / static_cast<double>(n)));
  }
  if (xs.size() < std::max<std::size_t>(min_points, 2))
    throw Error(ErrorKind::InsufficientData, "loglog_tail_fit: too few positive points in the tail region");

  const LineFit fit = least_squares_line(xs, ys);
  TailEstimate est;
  est.side = side;
  est.method = TailMethod::LogLogLS;
  est.index = -fit.slope;
  est.fraction_pct = 100.0 * static_cast<double>(xs.size()) / static_cast<double>(n);
  est.k_used = xs.size();
  est.r_squared = fit.r_squared;
  return est;
}

double empirical_tail(std::span<const double> data, double x, Side side) {
  if (data.empty()) throw Error(ErrorKind::EmptyInput, "empirical_tail: no data");
  std::size_t count = 0;
  for (double v : data)
    if (side == Side::Right ? v > x : v < -x) ++count;
  return static_cast<double>(count) / static_cast<double>(data.size());
}

std::vector<TailPlotPoint> tail_plot_points(std::span<const double> data, Side side) {
  const auto v = descending(data, side);
  const auto n = static_cast<double>(v.size());
  std::vector<TailPlotPoint> out;
  for (std::size_t i = 0; i < v.size() && v[i] > 0.0; ++i)
    out.push_back({std::log(v[i]), std::log(static_cast<double>(i + 1) / n)});
  return out;
}

}  // namespace tou
