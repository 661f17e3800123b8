#include "isslab/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <ostream>
#include <string>
#include <limits>
#include <thread>

#include "isslab/error.hpp"
#include "isslab/numfmt.hpp"

namespace isslab {

NormKind default_norm(Mode mode) {
  return mode == Mode::kOutputFeedback ? NormKind::kPrimaryPlusError : NormKind::kPrimary;
}

NormSeries linf_series(const SimTrace& trace, NormKind which) {
  if (trace.size() == 0) throw DomainError("linf_series: empty trace");
  NormSeries out;
  out.times = trace.times;
  switch (which) {
    case NormKind::kPrimary:
      out.norms.reserve(trace.size());
      for (const StateField& f : trace.fields) out.norms.push_back(f.linf());
      break;
    case NormKind::kError:
    case NormKind::kPrimaryPlusError:
      if (trace.linf_error.size() != trace.size()) {
        throw DomainError("linf_series: trace carries no estimation error");
      }
      out.norms = trace.linf_error;
      if (which == NormKind::kPrimaryPlusError) {
        for (std::size_t k = 0; k < out.norms.size(); ++k) {
          out.norms[k] += trace.fields[k].linf();
        }
      }
      break;
  }
  return out;
}

DecayFit fit_decay_rate(std::span<const double> times, std::span<const double> norms,
                        double t_lo, double t_hi) {
  if (times.size() != norms.size()) throw DimensionError("fit_decay_rate: length mismatch");
  DecayFit fit;
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  double st = 0, sy = 0, stt = 0, sty = 0;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] < t_lo || times[k] > t_hi) continue;
    if (!(norms[k] > 0.0)) {
      throw DomainError("fit_decay_rate: nonpositive norm at t = " + format_double(times[k]));
    }
    const double y = -std::log(norms[k]);
    pts.emplace_back(times[k], y);
    st += times[k];
    sy += y;
    stt += times[k] * times[k];
    sty += times[k] * y;
  }
  const double m = static_cast<double>(pts.size());
  if (pts.size() < 2) throw DomainError("fit_decay_rate: fewer than two samples in window");
  const double denom = m * stt - st * st;
  if (!(denom > 0.0)) throw DomainError("fit_decay_rate: degenerate time window");
  fit.sigma = (m * sty - st * sy) / denom;
  const double intercept = (sy - fit.sigma * st) / m;
  double ss = 0.0;
  for (const auto& [t, y] : pts) {
    const double e = y - (intercept + fit.sigma * t);
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / m);
  fit.points = pts.size();
  return fit;
}

std::size_t sweep_threads() {
  if (const char* env = std::getenv("ISSLAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SweepResult iss_sweep(const Scenario& base, const Design& design,
                      std::span<const double> scales, double t_lo, double t_hi,
                      NormKind which) {
  if (!std::is_sorted(scales.begin(), scales.end())) {
    throw DomainError("iss_sweep: scales must be sorted ascending");
  }
  if (!(t_lo <= t_hi) || t_lo < 0.0 || t_hi > base.t_end + 1e-12) {
    throw DomainError("iss_sweep: window must lie inside [0, t_end]");
  }
  const std::size_t count = scales.size();
  SweepResult out;
  out.scales.assign(scales.begin(), scales.end());
  out.sup_norms.assign(count, 0.0);
  out.t_lo = t_lo;
  out.t_hi = t_hi;

  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t idx = next++; idx < count; idx = next++) {
      try {
        Scenario s = base;
        s.amp = Amplitudes::from_scale(scales[idx]);
        const SimTrace trace = simulate(s, design);
        const NormSeries series = linf_series(trace, which);
        double sup = 0.0;
        for (std::size_t k = 0; k < series.times.size(); ++k) {
          if (series.times[k] >= t_lo - 1e-12 && series.times[k] <= t_hi + 1e-12) {
            sup = std::max(sup, series.norms[k]);
          }
        }
        out.sup_norms[idx] = sup;
      } catch (...) {
        errors[idx] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::min(sweep_threads(), count);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

double truncated_power_integral(double theta, double r) {
  return theta > 0.0 ? std::pow(theta, r + 1.0) / (r + 1.0) : 0.0;
}

LyapunovSeries lyapunov_monitor(const SimTrace& w_trace, double sigma, double r,
                                double d_check, double underline_c) {
  if (!(sigma > 0.0 && sigma < underline_c)) {
    throw DomainError("lyapunov_monitor: sigma must lie in (0, underline_c)");
  }
  if (!(r > 1.0)) throw DomainError("lyapunov_monitor: r must exceed 1");
  LyapunovSeries out;
  for (std::size_t k = 0; k < w_trace.size(); ++k) {
    const auto& w = w_trace.fields[k].values;
    const double t = w_trace.times[k];
    const double weight = std::exp(sigma * t);
    const std::size_t n = w.size();
    const double h = 1.0 / static_cast<double>(n - 1);
    double up = 0.0, lo = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double c = (i == 0 || i + 1 == n) ? 0.5 * h : h;
      up += c * truncated_power_integral(weight * w[i] - d_check, r);
      lo += c * truncated_power_integral(-weight * w[i] - d_check, r);
    }
    out.times.push_back(t);
    out.upper.push_back(up);
    out.lower.push_back(lo);
  }
  return out;
}

double lyapunov_bound(const Scenario& s, const Design& design, double sigma) {
  if (!design.k) throw DomainError("lyapunov_bound: design lacks the controller kernel");
  const TriGrid& k = *design.k;
  const double gap = s.underline_c() - sigma;
  if (!(gap > 0.0)) throw DomainError("lyapunov_bound: sigma must be below underline_c");

  StateField u0{std::vector<double>(s.n), 0.0};
  for (std::size_t i = 0; i < s.n; ++i) {
    u0.values[i] = profile_value(s.u0, static_cast<double>(i) / static_cast<double>(s.n - 1));
  }
  double bound = forward_transform(u0, k).linf();

  const TargetForcing forcing(s, k);
  std::vector<double> psi(s.n);
  const std::size_t half_steps = 2 * s.steps();
  for (std::size_t j = 0; j <= half_steps; ++j) {
    const double t = 0.5 * static_cast<double>(j) * s.dt;
    const double weight = std::exp(sigma * t);
    bound = std::max(bound, weight * std::abs(s.d0(t)) / s.q);
    bound = std::max(bound, weight * std::abs(s.d1(t)));
    forcing.eval(s, t, psi);
    double sup_psi = 0.0;
    for (double v : psi) sup_psi = std::max(sup_psi, std::abs(v));
    bound = std::max(bound, weight * sup_psi / gap);
  }
  return 1.01 * bound;
}

double max_increase(std::span<const double> series) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < series.size(); ++k) {
    worst = std::max(worst, series[k] - series[k - 1]);
  }
  return worst;
}

double transform_consistency(const SimTrace& u_trace, const SimTrace& w_trace,
                             const TriGrid& k) {
  if (u_trace.size() != w_trace.size()) {
    throw DimensionError("transform_consistency: traces differ in length");
  }
  double worst = 0.0;
  for (std::size_t idx = 0; idx < u_trace.size(); ++idx) {
    if (std::abs(u_trace.times[idx] - w_trace.times[idx]) > 1e-12) {
      throw DimensionError("transform_consistency: traces differ in stored times");
    }
    const StateField w = forward_transform(u_trace.fields[idx], k);
    const auto& ref = w_trace.fields[idx].values;
    if (ref.size() != w.n()) throw DimensionError("transform_consistency: grid mismatch");
    for (std::size_t i = 0; i < ref.size(); ++i) {
      worst = std::max(worst, std::abs(w.values[i] - ref[i]));
    }
  }
  return worst;
}

double trace_distance(const std::vector<StateField>& a, const std::vector<StateField>& b) {
  if (a.size() != b.size()) throw DimensionError("trace_distance: length mismatch");
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].n() != b[k].n()) throw DimensionError("trace_distance: grid mismatch");
    for (std::size_t i = 0; i < a[k].n(); ++i) {
      worst = std::max(worst, std::abs(a[k].values[i] - b[k].values[i]));
    }
  }
  return worst;
}

void write_sweep_csv(const SweepResult& sweep, std::ostream& out) {
  out << "scale,sup_norm\n";
  for (std::size_t k = 0; k < sweep.scales.size(); ++k) {
    out << format_double(sweep.scales[k]) << ',' << format_double(sweep.sup_norms[k]) << '\n';
  }
}

void write_decay_report(const DecayFit& fit, std::ostream& out) {
  out << "window=" << format_double(fit.t_lo) << ',' << format_double(fit.t_hi) << '\n'
      << "slope=" << format_double(fit.sigma) << '\n'
      << "residual=" << format_double(fit.residual) << '\n'
      << "points=" << fit.points << '\n';
}

void write_lyapunov_csv(const LyapunovSeries& series, std::ostream& out) {
  out << "t,V_upper,V_lower\n";
  for (std::size_t k = 0; k < series.times.size(); ++k) {
    out << format_double(series.times[k]) << ',' << format_double(series.upper[k]) << ','
        << format_double(series.lower[k]) << '\n';
  }
}

}  // namespace isslab
