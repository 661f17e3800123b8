#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace isslab::quad {

/// Gauss-Legendre rule on [-1, 1].
class GaussLegendre {
 public:
  explicit GaussLegendre(int order);

  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }

  /// Composite rule over `panels` equal panels of [a, b].
  template <class F>
  double integrate(F&& f, double a, double b, int panels) const {
    const double width = (b - a) / panels;
    const double half = 0.5 * width;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
      const double mid = a + (p + 0.5) * width;
      double acc = 0.0;
      for (std::size_t k = 0; k < nodes_.size(); ++k) {
        acc += weights_[k] * f(mid + half * nodes_[k]);
      }
      total += half * acc;
    }
    return total;
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

const GaussLegendre& gauss_legendre16();

// Quadrature on a uniform grid with step h over a segment of m intervals.
//
// For m >= 4 this is the Gregory rule: trapezoid plus end corrections through
// fourth differences, exact for quintics away from overlapping ends. Shorter
// segments use Simpson (m = 2) and Simpson 3/8 (m = 3).
//
// A single interval (m = 1) has only two nodes inside the segment. It is
// integrated with the three-point rule (5/12, 8/12, -1/12) that borrows the
// next node to the right, whenever a value there is available.

/// Weight of node k (0 <= k <= m) in units of h, for m >= 2.
double segment_weight(std::size_t m, std::size_t k);

inline constexpr double kOneIntervalWeights[3] = {5.0 / 12.0, 8.0 / 12.0,
                                                  -1.0 / 12.0};

/// Integral over a segment of m intervals of a function sampled on the grid.
/// `sample(k)` returns the integrand at the k-th node of the segment; for
/// m == 1 and `has_next`, sample(2) is also requested.
template <class F>
double segment_integral(double h, std::size_t m, F&& sample, bool has_next) {
  if (m == 0) return 0.0;
  if (m == 1) {
    if (!has_next) return 0.5 * h * (sample(0) + sample(1));
    return h * (kOneIntervalWeights[0] * sample(0) +
                kOneIntervalWeights[1] * sample(1) +
                kOneIntervalWeights[2] * sample(2));
  }
  double acc = 0.0;
  for (std::size_t k = 0; k <= m; ++k) acc += segment_weight(m, k) * sample(k);
  return h * acc;
}

}  // namespace isslab::quad
