#include "isslab/gains.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "isslab/error.hpp"
#include "isslab/kernels.hpp"
#include "isslab/numfmt.hpp"
#include "isslab/transforms.hpp"

namespace isslab {
namespace {

std::vector<double> source_term(const TriGrid& m, double p0, double q) {
  std::vector<double> src(m.n());
  for (std::size_t i = 0; i < m.n(); ++i) {
    src[i] = -eval_m_z_at_zero(m.x(i), m.c0()) + (q + p0) * m(i, 0);
  }
  return src;
}

}  // namespace

P0Check validate_p0(double p0, double c0, double q) {
  const double margin = p0 - (0.5 * c0 - q);
  return {margin > 0.0, margin};
}

GainProfile solve_p(const TriGrid& m, double p0, double q,
                    std::span<const double> seed) {
  if (m.kind() != KernelKind::kM) {
    throw DomainError("solve_p: expects an observer (M) kernel grid");
  }
  const P0Check check = validate_p0(p0, m.c0(), q);
  if (!check.valid) {
    throw DomainError("solve_p: p0 must exceed c0/2 - q (margin " +
                      format_double(check.margin) + ")");
  }
  const std::size_t n = m.n();
  if (!seed.empty() && seed.size() != n) {
    throw DimensionError("solve_p: seed has wrong length");
  }

  const std::vector<double> src = source_term(m, p0, q);
  std::vector<double> p = seed.empty() ? src : std::vector<double>(seed.begin(), seed.end());
  std::vector<double> next(n);

  GainProfile out;
  out.p0 = p0;
  out.q = q;
  out.c0 = m.c0();
  out.b = q + p0 - 0.5 * m.c0();

  for (int iter = 1; iter <= kGainMaxIterations; ++iter) {
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] = src[i] + row_integral(m, i, p);
      change = std::max(change, std::abs(next[i] - p[i]));
    }
    p.swap(next);
    if (!std::isfinite(change)) break;
    if (change < kGainTolerance) {
      out.p = std::move(p);
      out.iterations = iter;
      out.residual = gain_equation_residual(m, p0, q, out.p);
      return out;
    }
  }
  throw IterationError("solve_p: Picard iteration did not converge", 0.0,
                       kGainMaxIterations);
}

double gain_equation_residual(const TriGrid& m, double p0, double q,
                              std::span<const double> p) {
  if (p.size() != m.n()) throw DimensionError("gain residual: size mismatch");
  const std::vector<double> src = source_term(m, p0, q);
  double worst = 0.0;
  for (std::size_t i = 0; i < m.n(); ++i) {
    worst = std::max(worst, std::abs(p[i] - src[i] - row_integral(m, i, p)));
  }
  return worst;
}

std::vector<double> compute_kp(const GainProfile& gains, const TriGrid& k) {
  if (k.kind() != KernelKind::kK) {
    throw DomainError("compute_kp: expects a controller (K) kernel grid");
  }
  if (gains.n() != k.n()) {
    throw DimensionError("compute_kp: gain profile has " +
                         std::to_string(gains.n()) + " nodes, kernel grid has " +
                         std::to_string(k.n()));
  }
  std::vector<double> kp(k.n());
  for (std::size_t i = 0; i < k.n(); ++i) {
    kp[i] = gains.p[i] - gains.p0 * k(i, 0) - row_integral(k, i, gains.p);
  }
  return kp;
}

void write_gain_csv(const GainProfile& gains, std::ostream& out) {
  out << "x,p,kp\n";
  const std::size_t n = gains.n();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(n - 1);
    out << format_double(x) << ',' << format_double(gains.p[i]) << ',';
    if (i < gains.kp.size()) out << format_double(gains.kp[i]);
    out << '\n';
  }
}

void write_gain_metadata(const GainProfile& gains, std::ostream& out) {
  out << "p0=" << format_double(gains.p0) << '\n'
      << "q=" << format_double(gains.q) << '\n'
      << "c0=" << format_double(gains.c0) << '\n'
      << "b=" << format_double(gains.b) << '\n'
      << "residual=" << format_double(gains.residual) << '\n'
      << "iterations=" << gains.iterations << '\n'
      << "n=" << gains.n() << '\n';
}

}  // namespace isslab
