#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "isslab/trigrid.hpp"

namespace isslab {

struct P0Check {
  bool valid = false;
  /// p0 - (c0/2 - q); positive exactly when valid.
  double margin = 0.0;
};

/// The scalar output-injection gain must satisfy p0 > m(0,0) - q = c0/2 - q.
P0Check validate_p0(double p0, double c0, double q);

/// Observer gains sampled on the simulation grid.
struct GainProfile {
  double p0 = 0.0;
  double q = 0.0;
  double c0 = 0.0;
  /// Robin coefficient of the error target system, q + p0 - c0/2.
  double b = 0.0;
  std::vector<double> p;
  /// K_p(x) = p(x) - p0 k(x,0) - int_0^x k(x,z) p(z) dz; empty until filled.
  std::vector<double> kp;
  /// Sup-norm defect of the gain integral equation at the returned p.
  double residual = 0.0;
  int iterations = 0;

  std::size_t n() const { return p.size(); }
};

inline constexpr double kGainTolerance = 1e-12;
inline constexpr int kGainMaxIterations = 200;

/// Solves p(x) = -m_z(x,0) + (q + p0) m(x,0) + int_0^x m(x,z) p(z) dz by
/// Picard iteration on the nodes of `m`. `seed` replaces the default first
/// iterate (the source term) when non-empty. Throws DomainError when p0 fails
/// validate_p0 and IterationError when the cap is reached.
GainProfile solve_p(const TriGrid& m, double p0, double q,
                    std::span<const double> seed = {});

/// Sup-norm defect of the gain equation for an arbitrary profile.
double gain_equation_residual(const TriGrid& m, double p0, double q,
                              std::span<const double> p);

/// K_p on the nodes of `k`; throws DimensionError on grid mismatch.
std::vector<double> compute_kp(const GainProfile& gains, const TriGrid& k);

/// `x,p,kp` per node (kp column left empty when not computed).
void write_gain_csv(const GainProfile& gains, std::ostream& out);

/// key=value lines: p0, q, c0, b, residual, iterations, n.
void write_gain_metadata(const GainProfile& gains, std::ostream& out);

}  // namespace isslab
