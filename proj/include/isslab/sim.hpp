#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "isslab/gains.hpp"
#include "isslab/scenario.hpp"
#include "isslab/transforms.hpp"
#include "isslab/trigrid.hpp"

namespace isslab {

/// Kernels and gains a scenario needs. Built once, shared read-only by any
/// number of simulations on the same grid and coefficients.
struct Design {
  std::optional<TriGrid> k;
  std::optional<TriGrid> m;
  /// p, and K_p when k is present.
  std::optional<GainProfile> gains;
  /// Quadrature weights of the control law: U = sum_j w_j v_j.
  std::vector<double> control_weights;
};

/// Builds what `s.mode` requires (K for controlled and target modes, M and
/// the gains for observer modes).
Design build_design(const Scenario& s);

/// Source of the target system, psi = f - int_0^x k(x,z) f(z) dz + k(x,0) d0,
/// precomputed per node using the separable structure of f.
struct TargetForcing {
  std::vector<double> cos_part, sin_part, k0;

  TargetForcing(const Scenario& s, const TriGrid& k);
  void eval(const Scenario& s, double t, std::span<double> out) const;
};

/// Time-indexed record of a run, stored every `output_stride` steps.
struct SimTrace {
  Mode mode = Mode::kOpenLoop;
  std::vector<double> times;
  /// Primary state: u for plant modes, w, u_tilde or w_hat for the direct
  /// target, error and observer-target modes.
  std::vector<StateField> fields;
  /// Observer state u_hat (OutputFeedback) or co-simulated error u_tilde
  /// (ObserverTargetDirect); empty otherwise.
  std::vector<StateField> secondary;
  /// Control input U(t); NaN where the mode has no actuator.
  std::vector<double> control;
  /// Measurement y(t) = u(0,t) + dm(t); NaN where the mode has no plant.
  std::vector<double> output;
  /// Sup norm of the primary state.
  std::vector<double> linf;
  /// Sup norm of the estimation error u_tilde, when the mode carries one.
  std::vector<double> linf_error;

  std::size_t size() const { return times.size(); }
  bool has_secondary() const { return !secondary.empty(); }
  std::string primary_name() const;
  std::string secondary_name() const;
};

/// Crank-Nicolson steps for the whole horizon. Throws DivergenceError at the
/// first non-finite state.
SimTrace simulate(const Scenario& s, const Design& design);
SimTrace simulate(const Scenario& s);

/// Plant and observer in lockstep under output feedback (mode must be
/// OutputFeedback).
SimTrace simulate_coupled(const Scenario& s, const Design& design);

/// One Crank-Nicolson step of the plant from t to t + dt with the Dirichlet
/// value U + d1(t + dt) imposed at x = 1.
StateField step_plant(const StateField& u, double t, const Scenario& s, double U);

/// Mismatches of the initial data with the boundary conditions at t = 0
/// above 1e-8, as human-readable warnings.
std::vector<std::string> compatibility_warnings(const Scenario& s,
                                                const Design& design);

/// Initial fields for the mode: {primary, secondary (possibly empty)}.
std::pair<StateField, StateField> initial_fields(const Scenario& s,
                                                 const Design& design);

/// Long-format trace: t,x,<primary>[,<secondary>,u_tilde],U,y.
void write_trace_csv(const SimTrace& trace, std::ostream& out);
/// t,linf_<primary>[,linf_utilde].
void write_norms_csv(const SimTrace& trace, std::ostream& out);

}  // namespace isslab
