#include "isslab/isslab.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "isslab/analysis.hpp"
#include "isslab/error.hpp"
#include "isslab/gains.hpp"
#include "isslab/kernels.hpp"
#include "isslab/scenario.hpp"
#include "isslab/sim.hpp"
#include "isslab/verify.hpp"

struct isslab_kernel {
  isslab::TriGrid grid;
};

struct isslab_gains {
  isslab::GainProfile profile;
};

struct isslab_scenario {
  isslab::Scenario scenario;
};

struct isslab_trace {
  isslab::SimTrace trace;
};

namespace {

thread_local std::string g_last_error;

int fail(int status, const std::string& message) {
  g_last_error = message;
  return status;
}

struct ArgumentError : std::exception {
  std::string message;
  explicit ArgumentError(std::string m) : message(std::move(m)) {}
  const char* what() const noexcept override { return message.c_str(); }
};

// Runs body, translating exceptions into status codes.
template <class F>
int guard(F&& body) {
  try {
    body();
    g_last_error.clear();
    return ISSLAB_OK;
  } catch (const isslab::Error& e) {
    return fail(static_cast<int>(e.code()), e.what());
  } catch (const ArgumentError& e) {
    return fail(ISSLAB_E_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(ISSLAB_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(ISSLAB_E_INTERNAL, e.what());
  }
}

void need(const void* p, const char* name) {
  if (p == nullptr) throw ArgumentError(std::string(name) + " must not be null");
}

std::ofstream open_out(const char* path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw isslab::IoError(std::string("cannot open '") + path + "' for writing");
  return out;
}

void close_out(std::ofstream& out, const char* path) {
  out.close();
  if (!out) throw isslab::IoError(std::string("write to '") + path + "' failed");
}

void copy_text(const std::string& text, char* buf, size_t cap, size_t* needed) {
  if (needed) *needed = text.size();
  if (buf && cap > 0) {
    const size_t len = std::min(cap - 1, text.size());
    std::memcpy(buf, text.data(), len);
    buf[len] = '\0';
  }
}

isslab::KernelKind kind_from_int(int kind) {
  switch (kind) {
    case ISSLAB_KERNEL_K: return isslab::KernelKind::kK;
    case ISSLAB_KERNEL_L: return isslab::KernelKind::kL;
    case ISSLAB_KERNEL_M: return isslab::KernelKind::kM;
    case ISSLAB_KERNEL_N: return isslab::KernelKind::kN;
    default: throw ArgumentError("unknown kernel kind " + std::to_string(kind));
  }
}

}  // namespace

extern "C" {

const char* isslab_last_error(void) { return g_last_error.c_str(); }

const char* isslab_status_name(int status) {
  if (status == ISSLAB_E_ARGUMENT) return "invalid argument";
  if (status < 0 || status > ISSLAB_E_INTERNAL) return "unknown status";
  return isslab::error_code_name(static_cast<isslab::ErrorCode>(status));
}

int isslab_kernel_build(int kind, size_t n, double c0, double q, isslab_kernel** out) {
  return guard([&] {
    need(out, "out");
    *out = new isslab_kernel{isslab::build_grid(kind_from_int(kind), n, c0, q)};
  });
}

int isslab_kernel_invert(const isslab_kernel* direct, isslab_kernel** out) {
  return guard([&] {
    need(direct, "direct");
    need(out, "out");
    *out = new isslab_kernel{isslab::invert_kernel(direct->grid)};
  });
}

int isslab_kernel_size(const isslab_kernel* kernel, size_t* n) {
  return guard([&] {
    need(kernel, "kernel");
    need(n, "n");
    *n = kernel->grid.n();
  });
}

int isslab_kernel_value(const isslab_kernel* kernel, size_t i, size_t j, double* value) {
  return guard([&] {
    need(kernel, "kernel");
    need(value, "value");
    if (i >= kernel->grid.n() || j > i) {
      throw isslab::DimensionError("kernel index (" + std::to_string(i) + ", " +
                                   std::to_string(j) + ") outside the triangle");
    }
    *value = kernel->grid(i, j);
  });
}

int isslab_kernel_residual(const isslab_kernel* kernel, double* interior_max,
                           double* bc_max, double* diag_max) {
  return guard([&] {
    need(kernel, "kernel");
    const isslab::ResidualReport r = isslab::pde_residual(kernel->grid);
    if (interior_max) *interior_max = r.interior_max;
    if (bc_max) *bc_max = r.bc_max;
    if (diag_max) *diag_max = r.diag_max;
  });
}

int isslab_kernel_write_csv(const isslab_kernel* kernel, const char* path) {
  return guard([&] {
    need(kernel, "kernel");
    need(path, "path");
    std::ofstream out = open_out(path);
    isslab::write_grid_csv(kernel->grid, out);
    close_out(out, path);
  });
}

void isslab_kernel_free(isslab_kernel* kernel) { delete kernel; }

int isslab_p0_validate(double p0, double c0, double q, int* valid, double* margin) {
  return guard([&] {
    const isslab::P0Check c = isslab::validate_p0(p0, c0, q);
    if (valid) *valid = c.valid ? 1 : 0;
    if (margin) *margin = c.margin;
  });
}

int isslab_gains_solve(const isslab_kernel* m, double p0, double q, isslab_gains** out) {
  return guard([&] {
    need(m, "m");
    need(out, "out");
    *out = new isslab_gains{isslab::solve_p(m->grid, p0, q)};
  });
}

int isslab_gains_compute_kp(isslab_gains* gains, const isslab_kernel* k) {
  return guard([&] {
    need(gains, "gains");
    need(k, "k");
    gains->profile.kp = isslab::compute_kp(gains->profile, k->grid);
  });
}

int isslab_gains_size(const isslab_gains* gains, size_t* n) {
  return guard([&] {
    need(gains, "gains");
    need(n, "n");
    *n = gains->profile.n();
  });
}

int isslab_gains_copy(const isslab_gains* gains, double* p, double* kp, size_t n) {
  return guard([&] {
    need(gains, "gains");
    const isslab::GainProfile& g = gains->profile;
    if (n != g.n()) {
      throw isslab::DimensionError("gains have " + std::to_string(g.n()) +
                                   " nodes, buffer has " + std::to_string(n));
    }
    if (p) std::copy(g.p.begin(), g.p.end(), p);
    if (kp) {
      if (g.kp.empty()) throw isslab::DomainError("K_p has not been computed");
      std::copy(g.kp.begin(), g.kp.end(), kp);
    }
  });
}

int isslab_gains_info(const isslab_gains* gains, double* residual, int* iterations) {
  return guard([&] {
    need(gains, "gains");
    if (residual) *residual = gains->profile.residual;
    if (iterations) *iterations = gains->profile.iterations;
  });
}

int isslab_gains_write(const isslab_gains* gains, const char* csv_path,
                       const char* metadata_path) {
  return guard([&] {
    need(gains, "gains");
    if (csv_path) {
      std::ofstream out = open_out(csv_path);
      isslab::write_gain_csv(gains->profile, out);
      close_out(out, csv_path);
    }
    if (metadata_path) {
      std::ofstream out = open_out(metadata_path);
      isslab::write_gain_metadata(gains->profile, out);
      close_out(out, metadata_path);
    }
  });
}

void isslab_gains_free(isslab_gains* gains) { delete gains; }

int isslab_preset_names(char* buf, size_t cap, size_t* needed) {
  return guard([&] {
    std::string text;
    for (const std::string& name : isslab::preset_names()) text += name + "\n";
    copy_text(text, buf, cap, needed);
  });
}

int isslab_scenario_preset(const char* name, isslab_scenario** out) {
  return guard([&] {
    need(name, "name");
    need(out, "out");
    *out = new isslab_scenario{isslab::make_preset(name)};
  });
}

int isslab_scenario_load(const char* path, isslab_scenario** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new isslab_scenario{isslab::load_config(path)};
  });
}

int isslab_scenario_set(isslab_scenario* s, const char* key, const char* value) {
  return guard([&] {
    need(s, "scenario");
    need(key, "key");
    need(value, "value");
    isslab::apply_setting(s->scenario, key, value);
  });
}

int isslab_scenario_get(const isslab_scenario* s, const char* key, double* value) {
  return guard([&] {
    need(s, "scenario");
    need(key, "key");
    need(value, "value");
    const isslab::Scenario& sc = s->scenario;
    const std::string k = key;
    if (k == "q") *value = sc.q;
    else if (k == "c0") *value = sc.c0;
    else if (k == "p0") *value = sc.p0;
    else if (k == "n") *value = static_cast<double>(sc.n);
    else if (k == "dt") *value = sc.dt;
    else if (k == "t_end") *value = sc.t_end;
    else if (k == "a") *value = sc.amp.a;
    else if (k == "a0") *value = sc.amp.a0;
    else if (k == "a1") *value = sc.amp.a1;
    else if (k == "a2") *value = sc.amp.a2;
    else if (k == "output_stride") *value = static_cast<double>(sc.output_stride);
    else if (k == "underline_c") *value = sc.underline_c();
    else if (k == "mode") *value = static_cast<double>(sc.mode);
    else throw isslab::ConfigError("unknown numeric setting '" + k + "'");
  });
}

int isslab_scenario_validate(const isslab_scenario* s) {
  return guard([&] {
    need(s, "scenario");
    isslab::validate(s->scenario);
  });
}

int isslab_scenario_describe(const isslab_scenario* s, char* buf, size_t cap,
                             size_t* needed) {
  return guard([&] {
    need(s, "scenario");
    std::ostringstream out;
    isslab::describe(s->scenario, out);
    copy_text(out.str(), buf, cap, needed);
  });
}

int isslab_scenario_warnings(const isslab_scenario* s, char* buf, size_t cap,
                             size_t* needed) {
  return guard([&] {
    need(s, "scenario");
    isslab::validate(s->scenario);
    std::string text;
    const isslab::Design design = isslab::build_design(s->scenario);
    for (const std::string& w : isslab::compatibility_warnings(s->scenario, design)) {
      text += w + "\n";
    }
    copy_text(text, buf, cap, needed);
  });
}

void isslab_scenario_free(isslab_scenario* s) { delete s; }

int isslab_simulate(const isslab_scenario* s, isslab_trace** out) {
  return guard([&] {
    need(s, "scenario");
    need(out, "out");
    isslab::validate(s->scenario);
    *out = new isslab_trace{isslab::simulate(s->scenario)};
  });
}

int isslab_trace_size(const isslab_trace* t, size_t* samples, size_t* nodes) {
  return guard([&] {
    need(t, "trace");
    if (samples) *samples = t->trace.size();
    if (nodes) *nodes = t->trace.fields.empty() ? 0 : t->trace.fields.front().n();
  });
}

int isslab_trace_norms(const isslab_trace* t, double* times, double* linf, size_t samples) {
  return guard([&] {
    need(t, "trace");
    if (samples != t->trace.size()) {
      throw isslab::DimensionError("trace has " + std::to_string(t->trace.size()) +
                                   " samples, buffer has " + std::to_string(samples));
    }
    if (times) std::copy(t->trace.times.begin(), t->trace.times.end(), times);
    if (linf) std::copy(t->trace.linf.begin(), t->trace.linf.end(), linf);
  });
}

int isslab_trace_field(const isslab_trace* t, size_t sample, double* values, size_t nodes) {
  return guard([&] {
    need(t, "trace");
    need(values, "values");
    if (sample >= t->trace.size()) throw isslab::DimensionError("sample index out of range");
    const auto& field = t->trace.fields[sample].values;
    if (nodes != field.size()) throw isslab::DimensionError("node count mismatch");
    std::copy(field.begin(), field.end(), values);
  });
}

int isslab_trace_write(const isslab_trace* t, const char* trace_path, const char* norms_path) {
  return guard([&] {
    need(t, "trace");
    if (trace_path) {
      std::ofstream out = open_out(trace_path);
      isslab::write_trace_csv(t->trace, out);
      close_out(out, trace_path);
    }
    if (norms_path) {
      std::ofstream out = open_out(norms_path);
      isslab::write_norms_csv(t->trace, out);
      close_out(out, norms_path);
    }
  });
}

int isslab_trace_fit_decay(const isslab_trace* t, double t_lo, double t_hi, double* sigma,
                           double* residual, const char* path) {
  return guard([&] {
    need(t, "trace");
    const isslab::NormSeries norms =
        isslab::linf_series(t->trace, isslab::default_norm(t->trace.mode));
    const isslab::DecayFit fit = isslab::fit_decay_rate(norms.times, norms.norms, t_lo, t_hi);
    if (sigma) *sigma = fit.sigma;
    if (residual) *residual = fit.residual;
    if (path) {
      std::ofstream out = open_out(path);
      isslab::write_decay_report(fit, out);
      close_out(out, path);
    }
  });
}

void isslab_trace_free(isslab_trace* t) { delete t; }

int isslab_lyapunov(const isslab_scenario* s, double sigma, double r, const char* path,
                    double* max_increase) {
  return guard([&] {
    need(s, "scenario");
    const isslab::Scenario& sc = s->scenario;
    if (sc.mode != isslab::Mode::kTargetDirect) {
      throw isslab::ConfigError("Lyapunov monitoring needs a TargetDirect scenario");
    }
    isslab::validate(sc);
    if (sigma <= 0.0) sigma = 0.5 * sc.underline_c();
    const isslab::Design design = isslab::build_design(sc);
    const isslab::SimTrace w = isslab::simulate(sc, design);
    const double d_check = isslab::lyapunov_bound(sc, design, sigma);
    const isslab::LyapunovSeries v =
        isslab::lyapunov_monitor(w, sigma, r, d_check, sc.underline_c());
    if (max_increase) {
      *max_increase = std::max(isslab::max_increase(v.upper), isslab::max_increase(v.lower));
    }
    if (path) {
      std::ofstream out = open_out(path);
      isslab::write_lyapunov_csv(v, out);
      close_out(out, path);
    }
  });
}

int isslab_sweep(const isslab_scenario* base, const double* scales, size_t count,
                 double t_lo, double t_hi, double* sup_norms, const char* path) {
  return guard([&] {
    need(base, "scenario");
    need(scales, "scales");
    isslab::validate(base->scenario);
    const isslab::Design design = isslab::build_design(base->scenario);
    const isslab::SweepResult sweep =
        isslab::iss_sweep(base->scenario, design, std::span<const double>(scales, count),
                          t_lo, t_hi, isslab::default_norm(base->scenario.mode));
    if (sup_norms) std::copy(sweep.sup_norms.begin(), sweep.sup_norms.end(), sup_norms);
    if (path) {
      std::ofstream out = open_out(path);
      isslab::write_sweep_csv(sweep, out);
      close_out(out, path);
    }
  });
}

int isslab_verify(char* buf, size_t cap, size_t* needed, int* all_passed) {
  return guard([&] {
    const isslab::VerifyReport report = isslab::run_verify();
    if (all_passed) *all_passed = report.all_passed ? 1 : 0;
    copy_text(report.text, buf, cap, needed);
  });
}

}  // extern "C"
