#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace isslab {

/// Which backstepping kernel a grid holds. K and M are the direct kernels of
/// the controller and observer transformations, L and N their inverses.
enum class KernelKind { kK, kL, kM, kN };

std::string_view kernel_kind_name(KernelKind kind);

/// Kernel values sampled on the triangle {0 <= z <= x <= 1} at the nodes
/// (x_i, z_j) = (i h, j h), 0 <= j <= i <= n-1, h = 1/(n-1). Rows are stored
/// contiguously so row(i) is the kernel k(x_i, .) restricted to [0, x_i].
class TriGrid {
 public:
  /// `q` is the Robin coefficient the kernel was built for (K and L only).
  TriGrid(KernelKind kind, std::size_t n, double c0, double q = 0.0);

  KernelKind kind() const { return kind_; }
  std::size_t n() const { return n_; }
  double c0() const { return c0_; }
  double q() const { return q_; }
  double step() const { return 1.0 / static_cast<double>(n_ - 1); }
  double x(std::size_t i) const { return static_cast<double>(i) * step(); }

  double operator()(std::size_t i, std::size_t j) const {
    return values_[offset(i) + j];
  }
  double& operator()(std::size_t i, std::size_t j) {
    return values_[offset(i) + j];
  }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + offset(i), i + 1};
  }
  std::span<double> row(std::size_t i) {
    return {values_.data() + offset(i), i + 1};
  }
  std::span<const double> values() const { return values_; }

  /// Value just past the diagonal, k(x_i, x_{i+1}), by quadratic
  /// extrapolation along row i. Row 1 uses cubic extrapolation down the
  /// column z = x_2 instead (linear along the row when n < 6).
  double extrapolated_past_diagonal(std::size_t i) const;

  /// Bilinear interpolation for off-node queries, linear on diagonal cells.
  double interpolate(double x, double z) const;

  double max_abs() const;
  bool all_finite() const;

 private:
  static std::size_t offset(std::size_t i) { return i * (i + 1) / 2; }

  KernelKind kind_;
  std::size_t n_;
  double c0_;
  double q_;
  std::vector<double> values_;
};

/// Writes `x,z,value` rows over the triangle, row-major, 17 significant digits.
void write_grid_csv(const TriGrid& grid, std::ostream& out);

}  // namespace isslab
