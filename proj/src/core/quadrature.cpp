#include "isslab/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace isslab::quad {

GaussLegendre::GaussLegendre(int order)
    : nodes_(static_cast<std::size_t>(order)),
      weights_(static_cast<std::size_t>(order)) {
  // Newton iteration on P_order from the Chebyshev-like initial guess.
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int k = 1; k <= order; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p2) / k;
      }
      dp = order * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes_[static_cast<std::size_t>(i)] = -x;
    nodes_[static_cast<std::size_t>(order - 1 - i)] = x;
    weights_[static_cast<std::size_t>(i)] = w;
    weights_[static_cast<std::size_t>(order - 1 - i)] = w;
  }
}

const GaussLegendre& gauss_legendre16() {
  static const GaussLegendre rule(16);
  return rule;
}

double segment_weight(std::size_t m, std::size_t k) {
  if (m == 2) return (k == 1) ? 4.0 / 3.0 : 1.0 / 3.0;
  if (m == 3) return (k == 0 || k == 3) ? 3.0 / 8.0 : 9.0 / 8.0;
  // Gregory end corrections through fourth differences.
  static constexpr double kCorrection[5] = {-245.0 / 1440.0, 462.0 / 1440.0,
                                            -336.0 / 1440.0, 146.0 / 1440.0,
                                            -27.0 / 1440.0};
  double w = (k == 0 || k == m) ? 0.5 : 1.0;
  if (k < 5) w += kCorrection[k];
  if (m - k < 5) w += kCorrection[m - k];
  return w;
}

}  // namespace isslab::quad
