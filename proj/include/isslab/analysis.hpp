#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "isslab/scenario.hpp"
#include "isslab/sim.hpp"

namespace isslab {

enum class NormKind {
  /// Sup norm of the trace's primary state.
  kPrimary,
  /// Sup norm of the estimation error u_tilde.
  kError,
  /// ||u|| + ||u_tilde||, for the output-feedback closed loop.
  kPrimaryPlusError,
};

/// Norm used for an ISS sweep in a given mode.
NormKind default_norm(Mode mode);

struct NormSeries {
  std::vector<double> times;
  std::vector<double> norms;
};

/// Per stored step sup norms. Throws DomainError on an empty trace or when
/// the requested norm is not carried by the trace.
NormSeries linf_series(const SimTrace& trace, NormKind which = NormKind::kPrimary);

struct DecayFit {
  double t_lo = 0.0;
  double t_hi = 0.0;
  /// Least-squares slope of -log(norm) against t.
  double sigma = 0.0;
  /// Root-mean-square residual of the log-linear fit.
  double residual = 0.0;
  std::size_t points = 0;
};

/// Throws DomainError when a norm in the window is not positive or fewer
/// than two samples fall inside it.
DecayFit fit_decay_rate(std::span<const double> times, std::span<const double> norms,
                        double t_lo, double t_hi);

struct SweepResult {
  std::vector<double> scales;
  std::vector<double> sup_norms;
  double t_lo = 0.0;
  double t_hi = 0.0;
};

/// Worker count for sweeps: ISSLAB_THREADS if set (>= 1), otherwise the
/// hardware concurrency.
std::size_t sweep_threads();

/// One run per scale (amplitudes from Amplitudes::from_scale), sup of the
/// chosen norm over [t_lo, t_hi]. Runs fan out over sweep_threads() workers;
/// results are assembled in scale order, and the first failing scale's
/// error is rethrown.
SweepResult iss_sweep(const Scenario& base, const Design& design,
                      std::span<const double> scales, double t_lo, double t_hi,
                      NormKind which);

struct LyapunovSeries {
  std::vector<double> times;
  /// int G(e^{sigma t} w - D) dx.
  std::vector<double> upper;
  /// int G(-e^{sigma t} w - D) dx.
  std::vector<double> lower;
};

/// G(theta) = theta^{r+1}/(r+1) for theta > 0 and 0 otherwise.
double truncated_power_integral(double theta, double r);

/// Throws DomainError unless 0 < sigma < underline_c and r > 1.
LyapunovSeries lyapunov_monitor(const SimTrace& w_trace, double sigma, double r,
                                double d_check, double underline_c);

/// 1.01 max{||w0||, (1/q) sup|e^{st} d0|, sup|e^{st} d1|,
///          sup|e^{st} psi| / (underline_c - sigma)}
/// with suprema sampled at every step and half step of the horizon.
double lyapunov_bound(const Scenario& s, const Design& design, double sigma);

/// Largest per-step increase of a series (negative when strictly falling).
double max_increase(std::span<const double> series);

/// max over stored t of ||forward_transform(u[t], k) - w[t]||. Throws
/// DimensionError when the traces do not share times and grid.
double transform_consistency(const SimTrace& u_trace, const SimTrace& w_trace,
                             const TriGrid& k);

/// max over stored t of ||a[t] - b[t]|| for two traces of the same field.
double trace_distance(const std::vector<StateField>& a, const std::vector<StateField>& b);

void write_sweep_csv(const SweepResult& sweep, std::ostream& out);
void write_decay_report(const DecayFit& fit, std::ostream& out);
void write_lyapunov_csv(const LyapunovSeries& series, std::ostream& out);

}  // namespace isslab
