#pragma once

#include <cstddef>
#include <vector>

namespace tou {

/// Gauss–Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Rule of the given order; cached, thread-safe.
const GaussLegendreRule& gauss_legendre(std::size_t order);

/// Composite Gauss–Legendre over [a, b] with `panels` equal panels.
template <class F>
double integrate_gl(F&& f, double a, double b, std::size_t panels = 8, std::size_t order = 20) {
  const auto& rule = gauss_legendre(order);
  const double width = (b - a) / static_cast<double>(panels);
  double total = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + width * static_cast<double>(p);
    const double half = 0.5 * width;
    const double mid = lo + half;
    double panel = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) panel += rule.weights[i] * f(mid + half * rule.nodes[i]);
    total += half * panel;
  }
  return total;
}

}  // namespace tou
