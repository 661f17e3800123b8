#pragma once

#include <cstddef>

#include "isslab/trigrid.hpp"

namespace isslab {

/// Controller kernel k(x, z) from its closed form: a modified-Bessel term plus
/// a Robin correction integral, the latter by composite 16-point
/// Gauss-Legendre. Requires 0 <= z <= x <= 1, c0 > 0, q > 0.
double eval_k(double x, double z, double c0, double q);

/// Observer kernel m(x, z) = c0 (1-x) J1(s)/s, s = sqrt(c0 (x-z)(2-x-z)).
double eval_m(double x, double z, double c0);

/// Boundary derivative m_z(x, 0), analytic via the chain rule.
double eval_m_z_at_zero(double x, double c0);

/// Fills a grid of the given kind. K and M come from the closed forms; L and
/// N are obtained by inverting freshly built K and M grids.
TriGrid build_grid(KernelKind kind, std::size_t n, double c0, double q);

struct InversionStats {
  int iterations = 0;
  double last_change = 0.0;
};

inline constexpr double kInversionTolerance = 1e-12;
inline constexpr int kInversionMaxIterations = 200;

/// Inverse kernel of the Volterra transformation with kernel `direct`:
/// solves l(x,z) = k(x,z) + int_z^x k(x,s) l(s,z) ds by successive
/// approximation on the grid. K maps to L, M maps to N. Values needed just
/// outside the triangle are extrapolated from smooth neighbours. Throws
/// IterationError when the sweep cap is reached.
TriGrid invert_kernel(const TriGrid& direct, InversionStats* stats = nullptr);

/// Maximum defects of the kernel equations evaluated on the grid.
struct ResidualReport {
  /// Central-difference defect of g_xx - g_zz -/+ c0 g at interior nodes.
  double interior_max = 0.0;
  /// K, L: Robin condition g_z(x,0) - q g(x,0) (one-sided, second order).
  /// M, N: the terminal row g(1, z).
  double bc_max = 0.0;
  /// Diagonal identity: g(x,x) + c0 x/2 (K, L) or g(x,x) - c0 (1-x)/2 (M, N).
  double diag_max = 0.0;
};

ResidualReport pde_residual(const TriGrid& grid);

}  // namespace isslab
