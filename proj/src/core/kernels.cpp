#include "isslab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "isslab/error.hpp"
#include "isslab/quadrature.hpp"
#include "isslab/specfun.hpp"

namespace isslab {
namespace {

void check_triangle(double x, double z, const char* who) {
  if (!(std::isfinite(x) && std::isfinite(z)) || z < 0.0 || z > x || x > 1.0) {
    throw DomainError(std::string(who) + ": need 0 <= z <= x <= 1, got x=" +
                      std::to_string(x) + " z=" + std::to_string(z));
  }
}

void check_c0(double c0, const char* who) {
  if (!(c0 > 0.0) || !std::isfinite(c0)) {
    throw DomainError(std::string(who) + ": c0 must be positive");
  }
}

}  // namespace

double eval_k(double x, double z, double c0, double q) {
  check_triangle(x, z, "eval_k");
  check_c0(c0, "eval_k");
  if (!(q > 0.0) || !std::isfinite(q)) {
    throw DomainError("eval_k: q must be positive");
  }
  const double bessel_part =
      -c0 * x * specfun::i1_over_s(std::sqrt(c0 * (x * x - z * z)));
  const double len = x - z;
  if (len <= 0.0) return bessel_part;

  const double a = std::sqrt(c0 + q * q);
  const double sum = x + z;
  auto integrand = [&](double tau) {
    const double arg = std::max(c0 * sum * (len - tau), 0.0);
    return std::exp(-0.5 * q * tau) * specfun::bessel_i0(std::sqrt(arg)) *
           std::sinh(0.5 * a * tau);
  };
  const int panels = std::clamp(static_cast<int>(std::ceil(8.0 * len)), 1, 32);
  const double integral =
      quad::gauss_legendre16().integrate(integrand, 0.0, len, panels);
  return bessel_part + q * c0 / a * integral;
}

double eval_m(double x, double z, double c0) {
  check_triangle(x, z, "eval_m");
  check_c0(c0, "eval_m");
  const double arg = std::max(c0 * (x - z) * (2.0 - x - z), 0.0);
  return c0 * (1.0 - x) * specfun::j1_over_s(std::sqrt(arg));
}

double eval_m_z_at_zero(double x, double c0) {
  check_triangle(x, 0.0, "eval_m_z_at_zero");
  check_c0(c0, "eval_m_z_at_zero");
  // With s^2 = c0 (x-z)(2-x-z): s ds/dz = -c0 (1-z), so
  // m_z = c0 (1-x) * [(1/s) d/ds (J1(s)/s)] * (-c0 (1-z)).
  const double s = std::sqrt(std::max(c0 * x * (2.0 - x), 0.0));
  return -c0 * c0 * (1.0 - x) * specfun::j1_over_s_slope(s);
}

TriGrid build_grid(KernelKind kind, std::size_t n, double c0, double q) {
  switch (kind) {
    case KernelKind::kK: {
      TriGrid g(kind, n, c0, q);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) g(i, j) = eval_k(g.x(i), g.x(j), c0, q);
      }
      return g;
    }
    case KernelKind::kM: {
      TriGrid g(kind, n, c0, q);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) g(i, j) = eval_m(g.x(i), g.x(j), c0);
      }
      return g;
    }
    case KernelKind::kL:
      return invert_kernel(build_grid(KernelKind::kK, n, c0, q));
    case KernelKind::kN:
      return invert_kernel(build_grid(KernelKind::kM, n, c0, q));
  }
  throw DomainError("build_grid: unknown kernel kind");
}

TriGrid invert_kernel(const TriGrid& direct, InversionStats* stats) {
  KernelKind inverse_kind;
  switch (direct.kind()) {
    case KernelKind::kK: inverse_kind = KernelKind::kL; break;
    case KernelKind::kM: inverse_kind = KernelKind::kN; break;
    default:
      throw DomainError("invert_kernel: expects a direct (K or M) kernel");
  }
  if (!direct.all_finite()) {
    throw DomainError("invert_kernel: direct kernel has non-finite values");
  }

  const std::size_t n = direct.n();
  const double h = direct.step();
  TriGrid inv(inverse_kind, n, direct.c0(), direct.q());
  // Initial iterate: the direct kernel itself (exact on the diagonal).
  for (std::size_t i = 0; i < n; ++i) {
    std::copy(direct.row(i).begin(), direct.row(i).end(), inv.row(i).begin());
  }

  // Sweeps update column by column, rows in increasing x, reusing the values
  // already refreshed in the current sweep.
  double change = 0.0;
  for (int iter = 1; iter <= kInversionMaxIterations; ++iter) {
    change = 0.0;
    for (std::size_t j = 0; j + 1 < n; ++j) {
      for (std::size_t i = j + 1; i < n; ++i) {
        const std::size_t m = i - j;
        const auto krow = direct.row(i);
        // Below the last row, continue l along the line x - z = 2h.
        const bool continue_l = i + 1 == n && j >= 3;
        auto sample = [&](std::size_t k) {
          if (k <= m) return krow[j + k] * inv(j + k, j);
          const double next =
              continue_l ? 3.0 * inv(i, j - 1) - 3.0 * inv(i - 1, j - 2) + inv(i - 2, j - 3)
                         : inv(i + 1, j);
          return direct.extrapolated_past_diagonal(i) * next;
        };
        const double integral =
            quad::segment_integral(h, m, sample, i + 1 < n || continue_l);
        const double updated = direct(i, j) + integral;
        change = std::max(change, std::abs(updated - inv(i, j)));
        inv(i, j) = updated;
      }
    }
    if (!std::isfinite(change)) break;
    if (change < kInversionTolerance) {
      if (stats) *stats = {iter, change};
      return inv;
    }
  }
  throw IterationError("invert_kernel: no convergence within " +
                           std::to_string(kInversionMaxIterations) +
                           " sweeps (last change " + std::to_string(change) + ")",
                       change, kInversionMaxIterations);
}

ResidualReport pde_residual(const TriGrid& g) {
  const std::size_t n = g.n();
  if (n < 5) throw DomainError("pde_residual: need n >= 5");
  const double h = g.step();
  const double c0 = g.c0();
  const bool direct = g.kind() == KernelKind::kK || g.kind() == KernelKind::kM;
  const bool robin = g.kind() == KernelKind::kK || g.kind() == KernelKind::kL;
  const double reaction = direct ? c0 : -c0;

  ResidualReport rep;
  for (std::size_t i = 2; i + 1 < n; ++i) {
    for (std::size_t j = 1; j < i; ++j) {
      const double hyperbolic =
          (g(i + 1, j) + g(i - 1, j) - g(i, j + 1) - g(i, j - 1)) / (h * h);
      rep.interior_max =
          std::max(rep.interior_max, std::abs(hyperbolic - reaction * g(i, j)));
    }
  }
  if (robin) {
    for (std::size_t i = 2; i < n; ++i) {
      const double gz = (-3.0 * g(i, 0) + 4.0 * g(i, 1) - g(i, 2)) / (2.0 * h);
      rep.bc_max = std::max(rep.bc_max, std::abs(gz - g.q() * g(i, 0)));
    }
  } else {
    for (double v : g.row(n - 1)) rep.bc_max = std::max(rep.bc_max, std::abs(v));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double expected = robin ? -0.5 * c0 * g.x(i) : 0.5 * c0 * (1.0 - g.x(i));
    rep.diag_max = std::max(rep.diag_max, std::abs(g(i, i) - expected));
  }
  return rep;
}

}  // namespace isslab
