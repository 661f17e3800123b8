#include "isslab/sim.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <ostream>
#include <span>
#include <string>

#include "isslab/error.hpp"
#include "isslab/kernels.hpp"
#include "isslab/lowrank.hpp"
#include "isslab/numfmt.hpp"

namespace isslab {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kCompatibilityTolerance = 1e-8;

// One scalar field v on the grid:
//   v_t = v_xx + (lambda(t) + shift) v + source(x,t) + couplings,
//   v_x(0) = beta v(0) + g0(t) [+ coupling at the ghost node],
//   v(1) = g1(t) [+ sum_j w_j v_src(x_j) when feedback_source >= 0].
struct FieldSpec {
  double shift = 0.0;
  double beta = 0.0;
  std::function<double(double)> g0 = [](double) { return 0.0; };
  std::function<double(double)> g1 = [](double) { return 0.0; };
  std::function<void(double, std::span<double>)> source;
  int feedback_source = -1;
};

// Adds column[i] * v_source(0) to the rate of change of v_target at x_i.
struct Coupling {
  int target;
  int source;
  std::vector<double> column;
};

struct System {
  std::vector<FieldSpec> fields;
  std::vector<Coupling> couplings;
  std::vector<double> feedback_weights;
};

// Crank-Nicolson on a System; reaction, sources and Robin data are taken at
// the half step, the Dirichlet data at the new time level.
class Stepper {
 public:
  Stepper(const System& sys, const LambdaSpec& lambda, std::size_t n, double dt)
      : sys_(sys), lambda_(lambda), n_(n), h_(1.0 / static_cast<double>(n - 1)), dt_(dt) {
    build_solver();
  }

  void step(std::vector<double>& state, double t) {
    LowRankTridiagonal& solver = *solver_;
    const double dt = dt_;
    const std::size_t nf = sys_.fields.size();
    const double t_half = t + 0.5 * dt;
    const double reaction_base = lambda_(t_half);
    const double inv_h2 = 1.0 / (h_ * h_);
    const double half_dt = 0.5 * dt;

    auto lower = solver.lower();
    auto diag = solver.diag();
    auto upper = solver.upper();
    std::vector<double> rhs(state.size());
    source_.resize(n_);

    for (std::size_t f = 0; f < nf; ++f) {
      const FieldSpec& spec = sys_.fields[f];
      const std::size_t o = f * n_;
      const double a = reaction_base + spec.shift;
      std::span<const double> v(state.data() + o, n_);

      std::fill(source_.begin(), source_.end(), 0.0);
      if (spec.source) spec.source(t_half, source_);

      // Ghost-node row at x = 0.
      const double d0_diag = -2.0 * inv_h2 - 2.0 * spec.beta / h_;
      lower[o] = 0.0;
      diag[o] = 1.0 - half_dt * (d0_diag + a);
      upper[o] = -half_dt * 2.0 * inv_h2;
      const double dv0 = d0_diag * v[0] + 2.0 * inv_h2 * v[1];
      rhs[o] = v[0] + half_dt * (dv0 + a * v[0]) + dt * source_[0] -
               dt * 2.0 / h_ * spec.g0(t_half);

      for (std::size_t i = 1; i + 1 < n_; ++i) {
        lower[o + i] = -half_dt * inv_h2;
        diag[o + i] = 1.0 + half_dt * 2.0 * inv_h2 - half_dt * a;
        upper[o + i] = -half_dt * inv_h2;
        const double dv = (v[i + 1] - 2.0 * v[i] + v[i - 1]) * inv_h2;
        rhs[o + i] = v[i] + half_dt * (dv + a * v[i]) + dt * source_[i];
      }

      // Dirichlet row at x = 1.
      lower[o + n_ - 1] = 0.0;
      diag[o + n_ - 1] = 1.0;
      upper[o + n_ - 1] = 0.0;
      rhs[o + n_ - 1] = spec.g1(t + dt);
    }
    for (const Coupling& c : sys_.couplings) {
      const double v0 = state[static_cast<std::size_t>(c.source) * n_];
      const std::size_t o = static_cast<std::size_t>(c.target) * n_;
      for (std::size_t i = 0; i + 1 < n_; ++i) rhs[o + i] += half_dt * c.column[i] * v0;
    }

    solver.factor();
    solver.solve(rhs);
    state.swap(rhs);
  }

 private:
  void build_solver() {
    const double implicit = 0.5 * dt_;
    const std::size_t size = sys_.fields.size() * n_;
    auto solver = std::make_unique<LowRankTridiagonal>(size);
    // Couplings sharing a source node collapse into one rank-one term.
    std::map<int, std::vector<double>> by_source;
    for (const Coupling& c : sys_.couplings) {
      auto& col = by_source.try_emplace(c.source, size, 0.0).first->second;
      const std::size_t o = static_cast<std::size_t>(c.target) * n_;
      for (std::size_t i = 0; i + 1 < n_; ++i) col[o + i] -= implicit * c.column[i];
    }
    for (auto& [src, col] : by_source) {
      std::vector<double> row(size, 0.0);
      row[static_cast<std::size_t>(src) * n_] = 1.0;
      solver->add_correction(std::move(col), std::move(row));
    }
    for (std::size_t f = 0; f < sys_.fields.size(); ++f) {
      const int src = sys_.fields[f].feedback_source;
      if (src < 0) continue;
      std::vector<double> col(size, 0.0), row(size, 0.0);
      col[f * n_ + n_ - 1] = 1.0;
      const std::size_t o = static_cast<std::size_t>(src) * n_;
      for (std::size_t j = 0; j < n_; ++j) row[o + j] = -sys_.feedback_weights[j];
      solver->add_correction(std::move(col), std::move(row));
    }
    solver_ = std::move(solver);
  }

  const System& sys_;
  const LambdaSpec& lambda_;
  std::size_t n_;
  double h_;
  double dt_;
  std::vector<double> source_;
  std::unique_ptr<LowRankTridiagonal> solver_;
};

std::vector<double> sample(std::size_t n, const std::function<double(double)>& fn) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = fn(static_cast<double>(i) / static_cast<double>(n - 1));
  return out;
}

std::vector<double> profile(Profile p, std::size_t n) {
  return sample(n, [p](double x) { return profile_value(p, x); });
}

const TriGrid& need_k(const Design& d) {
  if (!d.k) throw Error(ErrorCode::kInternal, "design lacks the controller kernel");
  return *d.k;
}

const GainProfile& need_gains(const Design& d) {
  if (!d.gains) throw Error(ErrorCode::kInternal, "design lacks the observer gains");
  return *d.gains;
}

void check_grid(const Scenario& s, const Design& d) {
  if ((d.k && d.k->n() != s.n) || (d.m && d.m->n() != s.n)) {
    throw DimensionError("design grid does not match scenario n = " + std::to_string(s.n));
  }
}

// The plant-side field: u_t = u_xx + lambda u + f, u_x(0) = q u(0) + d0.
FieldSpec plant_field(const Scenario& s, std::size_t n) {
  FieldSpec spec;
  spec.beta = s.q;
  spec.g0 = [&s](double t) { return s.d0(t); };
  spec.g1 = [&s](double t) { return s.d1(t); };
  if (s.amp.a != 0.0) {
    auto cos_x = sample(n, [](double x) { return std::cos(x); });
    auto sin_x = sample(n, [](double x) { return std::sin(x); });
    spec.source = [&s, cos_x, sin_x](double t, std::span<double> out) {
      const double a = s.f_time_sin(t), b = s.f_time_cos(t);
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * cos_x[i] + b * sin_x[i];
    };
  }
  return spec;
}

// Error field of the observer: u~_t = u~_xx + lambda u~ + f - p dm - p u~(0),
// u~_x(0) = (q + p0) u~(0) + d0 + p0 dm, u~(1) = d1.
FieldSpec error_field(const Scenario& s, const GainProfile& g, std::size_t n) {
  FieldSpec spec;
  spec.beta = s.q + s.p0;
  spec.g0 = [&s](double t) { return s.d0(t) + s.p0 * s.dm(t); };
  spec.g1 = [&s](double t) { return s.d1(t); };
  auto cos_x = sample(n, [](double x) { return std::cos(x); });
  auto sin_x = sample(n, [](double x) { return std::sin(x); });
  spec.source = [&s, cos_x, sin_x, p = g.p](double t, std::span<double> out) {
    const double a = s.f_time_sin(t), b = s.f_time_cos(t), dm = s.dm(t);
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = a * cos_x[i] + b * sin_x[i] - p[i] * dm;
    }
  };
  return spec;
}

std::vector<double> scaled(const std::vector<double>& v, double c) {
  std::vector<double> out(v);
  for (double& x : out) x *= c;
  return out;
}

// Ghost-node coupling: a term gamma * v_src(0) in the Robin condition of the
// target field enters row 0 of the target as -(2/h) gamma v_src(0).
std::vector<double> ghost_column(std::size_t n, double gamma) {
  std::vector<double> col(n, 0.0);
  col[0] = -2.0 * gamma * static_cast<double>(n - 1);
  return col;
}

System build_system(const Scenario& s, const Design& d) {
  const std::size_t n = s.n;
  System sys;
  sys.feedback_weights = d.control_weights;
  switch (s.mode) {
    case Mode::kOpenLoop:
      sys.fields.push_back(plant_field(s, n));
      break;
    case Mode::kStateFeedback: {
      FieldSpec u = plant_field(s, n);
      u.feedback_source = 0;
      sys.fields.push_back(std::move(u));
      break;
    }
    case Mode::kTargetDirect: {
      // w_t = w_xx - c(t) w + psi, psi = f - int k f + k(x,0) d0.
      const TriGrid& k = need_k(d);
      FieldSpec w;
      w.shift = -s.c0;
      w.beta = s.q;
      w.g0 = [&s](double t) { return s.d0(t); };
      w.g1 = [&s](double t) { return s.d1(t); };
      w.source = [&s, forcing = TargetForcing(s, k)](double t, std::span<double> out) {
        forcing.eval(s, t, out);
      };
      sys.fields.push_back(std::move(w));
      break;
    }
    case Mode::kErrorDirect: {
      const GainProfile& g = need_gains(d);
      sys.fields.push_back(error_field(s, g, n));
      sys.couplings.push_back({0, 0, scaled(g.p, -1.0)});
      break;
    }
    case Mode::kOutputFeedback: {
      // Field 0: plant u. Field 1: observer u^ with
      //   u^_t = u^_xx + lambda u^ + p (u(0) + dm - u^(0)),
      //   u^_x(0) = (q + p0) u^(0) - p0 (u(0) + dm), u^(1) = U.
      const GainProfile& g = need_gains(d);
      FieldSpec u = plant_field(s, n);
      u.feedback_source = 1;
      FieldSpec obs;
      obs.beta = s.q + s.p0;
      obs.g0 = [&s](double t) { return -s.p0 * s.dm(t); };
      obs.source = [&s, p = g.p](double t, std::span<double> out) {
        const double dm = s.dm(t);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = p[i] * dm;
      };
      obs.feedback_source = 1;
      sys.fields.push_back(std::move(u));
      sys.fields.push_back(std::move(obs));
      sys.couplings.push_back({1, 1, scaled(g.p, -1.0)});
      sys.couplings.push_back({1, 0, g.p});
      sys.couplings.push_back({1, 0, ghost_column(n, -s.p0)});
      break;
    }
    case Mode::kObserverTargetDirect: {
      // Field 0: w^_t = w^_xx - c(t) w^ + K_p (u~(0) + dm),
      //   w^_x(0) = q w^(0) - p0 (u~(0) + dm), w^(1) = 0.
      // Field 1: the error system it is driven by.
      const GainProfile& g = need_gains(d);
      FieldSpec w;
      w.shift = -s.c0;
      w.beta = s.q;
      w.g0 = [&s](double t) { return -s.p0 * s.dm(t); };
      w.source = [&s, kp = g.kp](double t, std::span<double> out) {
        const double dm = s.dm(t);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = kp[i] * dm;
      };
      sys.fields.push_back(std::move(w));
      sys.fields.push_back(error_field(s, g, n));
      sys.couplings.push_back({0, 1, g.kp});
      sys.couplings.push_back({0, 1, ghost_column(n, -s.p0)});
      sys.couplings.push_back({1, 1, scaled(g.p, -1.0)});
      break;
    }
  }
  return sys;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

void record(SimTrace& trace, const Scenario& s, const Design& d, double t,
            std::span<const double> state) {
  const std::size_t n = s.n;
  std::span<const double> primary = state.subspan(0, n);
  trace.times.push_back(t);
  trace.fields.push_back({std::vector<double>(primary.begin(), primary.end()), t});
  trace.linf.push_back(max_abs(primary));

  double control = kNaN, output = kNaN, err_norm = kNaN;
  switch (s.mode) {
    case Mode::kOpenLoop:
      control = 0.0;
      output = primary[0] + s.dm(t);
      break;
    case Mode::kStateFeedback:
      control = row_integral(*d.k, n - 1, primary);
      output = primary[0] + s.dm(t);
      break;
    case Mode::kOutputFeedback: {
      std::span<const double> obs = state.subspan(n, n);
      trace.secondary.push_back({std::vector<double>(obs.begin(), obs.end()), t});
      control = row_integral(*d.k, n - 1, obs);
      output = primary[0] + s.dm(t);
      err_norm = 0.0;
      for (std::size_t i = 0; i < n; ++i) err_norm = std::max(err_norm, std::abs(primary[i] - obs[i]));
      break;
    }
    case Mode::kErrorDirect:
      err_norm = trace.linf.back();
      break;
    case Mode::kObserverTargetDirect: {
      std::span<const double> err = state.subspan(n, n);
      trace.secondary.push_back({std::vector<double>(err.begin(), err.end()), t});
      err_norm = max_abs(err);
      break;
    }
    case Mode::kTargetDirect:
      break;
  }
  trace.control.push_back(control);
  trace.output.push_back(output);
  if (!std::isnan(err_norm)) trace.linf_error.push_back(err_norm);
}

SimTrace run(const Scenario& s, const Design& d) {
  validate(s);
  check_grid(s, d);
  const System sys = build_system(s, d);
  auto [first, second] = initial_fields(s, d);
  std::vector<double> state = std::move(first.values);
  state.insert(state.end(), second.values.begin(), second.values.end());

  SimTrace trace;
  trace.mode = s.mode;
  record(trace, s, d, 0.0, state);

  Stepper stepper(sys, s.lambda, s.n, s.dt);
  const std::size_t steps = s.steps();
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * s.dt;
    stepper.step(state, t);
    const double t_next = static_cast<double>(k + 1) * s.dt;
    if (!all_finite(state)) {
      throw DivergenceError("simulation diverged at t = " + format_double(t_next), t_next);
    }
    if ((k + 1) % s.output_stride == 0 || k + 1 == steps) {
      record(trace, s, d, t_next, state);
    }
  }
  return trace;
}

}  // namespace

TargetForcing::TargetForcing(const Scenario& s, const TriGrid& k)
    : cos_part(s.n), sin_part(s.n), k0(s.n) {
  if (k.n() != s.n) throw DimensionError("target forcing: grid mismatch");
  const auto cos_x = sample(s.n, [](double x) { return std::cos(x); });
  const auto sin_x = sample(s.n, [](double x) { return std::sin(x); });
  for (std::size_t i = 0; i < s.n; ++i) {
    cos_part[i] = cos_x[i] - row_integral(k, i, cos_x);
    sin_part[i] = sin_x[i] - row_integral(k, i, sin_x);
    k0[i] = k(i, 0);
  }
}

void TargetForcing::eval(const Scenario& s, double t, std::span<double> out) const {
  const double a = s.f_time_sin(t), b = s.f_time_cos(t), d0 = s.d0(t);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = a * cos_part[i] + b * sin_part[i] + k0[i] * d0;
  }
}

std::string SimTrace::primary_name() const {
  switch (mode) {
    case Mode::kTargetDirect: return "w";
    case Mode::kErrorDirect: return "u_tilde";
    case Mode::kObserverTargetDirect: return "w_hat";
    default: return "u";
  }
}

std::string SimTrace::secondary_name() const {
  switch (mode) {
    case Mode::kOutputFeedback: return "u_hat";
    case Mode::kObserverTargetDirect: return "u_tilde";
    default: return "";
  }
}

Design build_design(const Scenario& s) {
  validate(s);
  Design d;
  const bool needs_k = s.mode != Mode::kOpenLoop && s.mode != Mode::kErrorDirect;
  if (needs_k) {
    d.k = build_grid(KernelKind::kK, s.n, s.c0, s.q);
    d.control_weights.assign(s.n, 0.0);
    std::vector<double> unit(s.n, 0.0);
    for (std::size_t j = 0; j < s.n; ++j) {
      unit[j] = 1.0;
      d.control_weights[j] = row_integral(*d.k, s.n - 1, unit);
      unit[j] = 0.0;
    }
  }
  if (s.needs_observer()) {
    d.m = build_grid(KernelKind::kM, s.n, s.c0, s.q);
    d.gains = solve_p(*d.m, s.p0, s.q);
    if (d.k) d.gains->kp = compute_kp(*d.gains, *d.k);
  }
  return d;
}

std::pair<StateField, StateField> initial_fields(const Scenario& s, const Design& d) {
  const std::size_t n = s.n;
  StateField u{profile(s.u0, n), 0.0};
  StateField u_hat{profile(s.u_hat0, n), 0.0};
  StateField err{std::vector<double>(n), 0.0};
  for (std::size_t i = 0; i < n; ++i) err.values[i] = u.values[i] - u_hat.values[i];
  switch (s.mode) {
    case Mode::kOpenLoop:
    case Mode::kStateFeedback: return {u, {}};
    case Mode::kOutputFeedback: return {u, u_hat};
    case Mode::kTargetDirect: return {forward_transform(u, need_k(d)), {}};
    case Mode::kErrorDirect: return {err, {}};
    case Mode::kObserverTargetDirect: return {forward_transform(u_hat, need_k(d)), err};
  }
  return {u, {}};
}

SimTrace simulate(const Scenario& s, const Design& design) {
  if (s.mode == Mode::kOutputFeedback) return simulate_coupled(s, design);
  return run(s, design);
}

SimTrace simulate(const Scenario& s) { return simulate(s, build_design(s)); }

SimTrace simulate_coupled(const Scenario& s, const Design& design) {
  if (s.mode != Mode::kOutputFeedback) {
    throw ConfigError("simulate_coupled requires mode OutputFeedback");
  }
  return run(s, design);
}

StateField step_plant(const StateField& u, double t, const Scenario& s, double U) {
  if (u.n() != s.n) throw DimensionError("step_plant: field does not match scenario n");
  System sys;
  FieldSpec plant = plant_field(s, s.n);
  plant.g1 = [&s, U](double tt) { return U + s.d1(tt); };
  sys.fields.push_back(std::move(plant));
  Stepper stepper(sys, s.lambda, s.n, s.dt);
  std::vector<double> state = u.values;
  stepper.step(state, t);
  return {std::move(state), t + s.dt};
}

std::vector<std::string> compatibility_warnings(const Scenario& s, const Design& d) {
  std::vector<std::string> out;
  auto check = [&](const std::string& what, double lhs, double rhs) {
    if (std::abs(lhs - rhs) > kCompatibilityTolerance) {
      out.push_back(what + ": " + format_double(lhs) + " vs " + format_double(rhs));
    }
  };
  const double u0_0 = profile_value(s.u0, 0.0);
  check("plant Robin condition u0'(0) = q u0(0) + d0(0)", profile_derivative(s.u0, 0.0),
        s.q * u0_0 + s.d0(0.0));
  double U0 = 0.0;
  const std::vector<double> u0 = profile(s.u0, s.n);
  const std::vector<double> uh0 = profile(s.u_hat0, s.n);
  if (s.mode == Mode::kOutputFeedback && !d.control_weights.empty()) {
    U0 = dot(d.control_weights, uh0);
  } else if (s.mode != Mode::kOpenLoop && !d.control_weights.empty()) {
    U0 = dot(d.control_weights, u0);
  }
  check("plant Dirichlet condition u0(1) = U(0) + d1(0)", profile_value(s.u0, 1.0),
        U0 + s.d1(0.0));
  if (s.needs_observer()) {
    check("observer Robin condition u^0'(0) = (q+p0) u^0(0) - p0 y(0)",
          profile_derivative(s.u_hat0, 0.0),
          (s.q + s.p0) * profile_value(s.u_hat0, 0.0) - s.p0 * (u0_0 + s.dm(0.0)));
    if (!d.control_weights.empty()) {
      check("observer Dirichlet condition u^0(1) = U(0)", profile_value(s.u_hat0, 1.0),
            dot(d.control_weights, uh0));
    }
  }
  return out;
}

namespace {

void put(std::ostream& out, double v) {
  if (!std::isnan(v)) out << format_double(v);
}

}  // namespace

void write_trace_csv(const SimTrace& trace, std::ostream& out) {
  const bool coupled = trace.mode == Mode::kOutputFeedback;
  out << "t,x," << trace.primary_name();
  if (trace.has_secondary()) out << ',' << trace.secondary_name();
  if (coupled) out << ",u_tilde";
  out << ",U,y\n";
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const auto& u = trace.fields[k].values;
    const std::size_t n = u.size();
    const std::string ts = format_double(trace.times[k]);
    for (std::size_t i = 0; i < n; ++i) {
      out << ts << ',' << format_double(static_cast<double>(i) / static_cast<double>(n - 1))
          << ',' << format_double(u[i]);
      if (trace.has_secondary()) {
        const double v = trace.secondary[k].values[i];
        out << ',' << format_double(v);
        if (coupled) out << ',' << format_double(u[i] - v);
      }
      out << ',';
      put(out, trace.control[k]);
      out << ',';
      put(out, trace.output[k]);
      out << '\n';
    }
  }
}

void write_norms_csv(const SimTrace& trace, std::ostream& out) {
  const bool with_error = !trace.linf_error.empty() && trace.mode != Mode::kErrorDirect;
  out << "t,linf_" << (trace.mode == Mode::kErrorDirect ? std::string("utilde")
                                                          : trace.primary_name());
  if (with_error) out << ",linf_utilde";
  out << '\n';
  for (std::size_t k = 0; k < trace.size(); ++k) {
    out << format_double(trace.times[k]) << ',' << format_double(trace.linf[k]);
    if (with_error) out << ',' << format_double(trace.linf_error[k]);
    out << '\n';
  }
}

}  // namespace isslab
