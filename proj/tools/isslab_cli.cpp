// Command-line front end. Talks to the library only through the C API.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "isslab/isslab.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitChecksFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitDivergence = 4;
constexpr int kExitIo = 5;

const char* const kExitHelp =
    "Exit codes:\n"
    "  0  success\n"
    "  1  verify: at least one check failed\n"
    "  2  configuration error (unknown preset, unparsable config, bad option)\n"
    "  3  solver failure (non-convergence, invalid gain, internal error)\n"
    "  4  divergence (non-finite state during a simulation)\n"
    "  5  i/o error (output not writable)\n"
    "Environment: ISSLAB_THREADS caps the number of sweep workers.\n";

struct Failure {
  int exit_code;
  std::string message;
};

int exit_code_for(int status) {
  switch (status) {
    case ISSLAB_E_CONFIG:
    case ISSLAB_E_ARGUMENT: return kExitConfig;
    case ISSLAB_E_DIVERGENCE: return kExitDivergence;
    case ISSLAB_E_IO: return kExitIo;
    default: return kExitSolver;
  }
}

void check(int status) {
  if (status != ISSLAB_OK) {
    throw Failure{exit_code_for(status),
                  std::string(isslab_status_name(status)) + ": " + isslab_last_error()};
  }
}

template <class Fn>
std::string read_text(Fn&& fn) {
  size_t needed = 0;
  check(fn(nullptr, 0, &needed));
  std::string text(needed + 1, '\0');
  check(fn(text.data(), text.size(), &needed));
  text.resize(needed);
  return text;
}

struct ScenarioDeleter {
  void operator()(isslab_scenario* s) const { isslab_scenario_free(s); }
};
struct KernelDeleter {
  void operator()(isslab_kernel* k) const { isslab_kernel_free(k); }
};
struct GainsDeleter {
  void operator()(isslab_gains* g) const { isslab_gains_free(g); }
};
struct TraceDeleter {
  void operator()(isslab_trace* t) const { isslab_trace_free(t); }
};
using ScenarioPtr = std::unique_ptr<isslab_scenario, ScenarioDeleter>;
using KernelPtr = std::unique_ptr<isslab_kernel, KernelDeleter>;
using GainsPtr = std::unique_ptr<isslab_gains, GainsDeleter>;
using TracePtr = std::unique_ptr<isslab_trace, TraceDeleter>;

struct Options {
  std::string preset;
  std::string config;
  std::string out = "isslab_out";
  std::string mode;
  std::vector<double> amplitudes;
  std::vector<std::string> settings;
  std::vector<double> window;
  std::size_t n = 0;
  double dt = 0.0;
  double t_end = 0.0;
  double sigma = 0.0;
  double r = 3.0;
};

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void set(isslab_scenario* s, const std::string& key, const std::string& value) {
  check(isslab_scenario_set(s, key.c_str(), value.c_str()));
}

// Scenario from --config or --preset (default paper_fig2a), then overrides.
ScenarioPtr make_scenario(const Options& o, bool amplitudes_are_scales) {
  isslab_scenario* raw = nullptr;
  if (!o.config.empty()) {
    check(isslab_scenario_load(o.config.c_str(), &raw));
  } else {
    check(isslab_scenario_preset(o.preset.empty() ? "paper_fig2a" : o.preset.c_str(), &raw));
  }
  ScenarioPtr s(raw);
  if (!o.config.empty() && !o.preset.empty()) set(s.get(), "preset", o.preset);
  for (const std::string& kv : o.settings) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Failure{kExitConfig, "--set expects key=value, got '" + kv + "'"};
    set(s.get(), kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!o.mode.empty()) set(s.get(), "mode", o.mode);
  if (o.n != 0) set(s.get(), "n", std::to_string(o.n));
  if (o.dt != 0.0) set(s.get(), "dt", format_real(o.dt));
  if (o.t_end != 0.0) set(s.get(), "t_end", format_real(o.t_end));
  if (!amplitudes_are_scales && !o.amplitudes.empty()) {
    if (o.amplitudes.size() == 1) {
      set(s.get(), "scale", format_real(o.amplitudes[0]));
    } else if (o.amplitudes.size() == 4) {
      const char* keys[] = {"a", "a0", "a1", "a2"};
      for (int i = 0; i < 4; ++i) set(s.get(), keys[i], format_real(o.amplitudes[i]));
    } else {
      throw Failure{kExitConfig, "--amplitudes takes one scale or four values A A0 A1 A2"};
    }
  }
  check(isslab_scenario_validate(s.get()));
  return s;
}

fs::path prepare_out(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Failure{kExitIo, "cannot create '" + dir + "': " + ec.message()};
  return fs::path(dir);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.close();
  if (!out) throw Failure{kExitIo, "cannot write '" + path.string() + "'"};
}

double get(const isslab_scenario* s, const char* key) {
  double v = 0.0;
  check(isslab_scenario_get(s, key, &v));
  return v;
}

void report_warnings(const isslab_scenario* s) {
  const std::string warnings = read_text([&](char* b, size_t c, size_t* n) {
    return isslab_scenario_warnings(s, b, c, n);
  });
  std::istringstream lines(warnings);
  std::string line;
  while (std::getline(lines, line)) std::cerr << "warning: " << line << "\n";
}

std::string describe(const isslab_scenario* s) {
  return read_text([&](char* b, size_t c, size_t* n) { return isslab_scenario_describe(s, b, c, n); });
}

int run_kernels(const Options& o) {
  ScenarioPtr s = make_scenario(o, false);
  const fs::path out = prepare_out(o.out);
  const auto n = static_cast<size_t>(get(s.get(), "n"));
  const double c0 = get(s.get(), "c0"), q = get(s.get(), "q");
  std::string report;
  const struct {
    int kind;
    const char* name;
  } kinds[] = {{ISSLAB_KERNEL_K, "k"}, {ISSLAB_KERNEL_M, "m"}};
  for (const auto& kind : kinds) {
    isslab_kernel* raw = nullptr;
    check(isslab_kernel_build(kind.kind, n, c0, q, &raw));
    KernelPtr direct(raw);
    check(isslab_kernel_invert(direct.get(), &raw));
    KernelPtr inverse(raw);
    const std::string inverse_name = kind.kind == ISSLAB_KERNEL_K ? "l" : "n";
    for (const auto& [grid, name] : {std::pair{direct.get(), std::string(kind.name)},
                                     std::pair{inverse.get(), inverse_name}}) {
      check(isslab_kernel_write_csv(grid, (out / (name + ".csv")).string().c_str()));
      double interior = 0.0, bc = 0.0, diag = 0.0;
      check(isslab_kernel_residual(grid, &interior, &bc, &diag));
      report += name + ".interior_max=" + format_real(interior) + "\n" + name +
                ".bc_max=" + format_real(bc) + "\n" + name + ".diag_max=" + format_real(diag) + "\n";
    }
  }
  report = "n=" + std::to_string(n) + "\n" + report;
  write_file(out / "residuals.txt", report);
  std::cout << report;
  return kExitOk;
}

int run_gains(const Options& o) {
  ScenarioPtr s = make_scenario(o, false);
  const fs::path out = prepare_out(o.out);
  const auto n = static_cast<size_t>(get(s.get(), "n"));
  const double c0 = get(s.get(), "c0"), q = get(s.get(), "q"), p0 = get(s.get(), "p0");
  int valid = 0;
  double margin = 0.0;
  check(isslab_p0_validate(p0, c0, q, &valid, &margin));
  std::cout << "p0 margin " << format_real(margin) << (valid ? " (valid)\n" : " (invalid)\n");
  isslab_kernel* raw = nullptr;
  check(isslab_kernel_build(ISSLAB_KERNEL_M, n, c0, q, &raw));
  KernelPtr m(raw);
  check(isslab_kernel_build(ISSLAB_KERNEL_K, n, c0, q, &raw));
  KernelPtr k(raw);
  isslab_gains* graw = nullptr;
  check(isslab_gains_solve(m.get(), p0, q, &graw));
  GainsPtr g(graw);
  check(isslab_gains_compute_kp(g.get(), k.get()));
  check(isslab_gains_write(g.get(), (out / "gains.csv").string().c_str(),
                           (out / "gains_meta.txt").string().c_str()));
  double residual = 0.0;
  int iterations = 0;
  check(isslab_gains_info(g.get(), &residual, &iterations));
  std::cout << "residual " << format_real(residual) << " after " << iterations
            << " iterations\n";
  return kExitOk;
}

// Trace, norms, scenario description; optional decay fit and Lyapunov data.
void simulate_into(const isslab_scenario* s, const fs::path& out, const std::string& prefix,
                   const Options& o, bool extras) {
  report_warnings(s);
  isslab_trace* raw = nullptr;
  check(isslab_simulate(s, &raw));
  TracePtr t(raw);
  check(isslab_trace_write(t.get(), (out / (prefix + "trace.csv")).string().c_str(),
                           (out / (prefix + "norms.csv")).string().c_str()));
  write_file(out / (prefix + "scenario.txt"), describe(s));
  if (!extras) return;
  const int mode = static_cast<int>(get(s, "mode"));
  constexpr int kOpenLoop = 0, kTargetDirect = 3;
  if (mode != kOpenLoop) {
    const double lo = o.window.size() == 2 ? o.window[0] : 0.5;
    const double hi = o.window.size() == 2 ? o.window[1] : 2.0;
    double sigma = 0.0, residual = 0.0;
    check(isslab_trace_fit_decay(t.get(), lo, hi, &sigma, &residual,
                                 (out / (prefix + "decay_fit.txt")).string().c_str()));
    std::cout << "decay rate " << format_real(sigma) << " on [" << lo << ", " << hi << "]\n";
  }
  if (mode == kTargetDirect) {
    double increase = 0.0;
    check(isslab_lyapunov(s, o.sigma, o.r, (out / (prefix + "lyapunov.csv")).string().c_str(),
                          &increase));
    std::cout << "Lyapunov max step increase " << format_real(increase) << "\n";
  }
}

int run_simulate(const Options& o) {
  ScenarioPtr s = make_scenario(o, false);
  const fs::path out = prepare_out(o.out);
  simulate_into(s.get(), out, "", o, true);
  std::cout << "wrote " << (out / "trace.csv").string() << "\n";
  return kExitOk;
}

int run_sweep(const Options& o) {
  ScenarioPtr s = make_scenario(o, true);
  const fs::path out = prepare_out(o.out);
  const std::vector<double> scales =
      o.amplitudes.empty() ? std::vector<double>{0.0, 1.0, 3.0} : o.amplitudes;
  const double lo = o.window.size() == 2 ? o.window[0] : 1.0;
  const double hi = o.window.size() == 2 ? o.window[1] : 4.0;
  std::vector<double> sup(scales.size());
  check(isslab_sweep(s.get(), scales.data(), scales.size(), lo, hi, sup.data(),
                     (out / "sweep.csv").string().c_str()));
  for (std::size_t i = 0; i < scales.size(); ++i) {
    std::cout << "scale " << format_real(scales[i]) << ": sup norm " << format_real(sup[i]) << "\n";
  }
  return kExitOk;
}

int run_verify(const Options& o, bool write_report) {
  int all_passed = 0;
  const std::string report = read_text([&](char* b, size_t c, size_t* n) {
    return isslab_verify(b, c, n, &all_passed);
  });
  std::cout << report;
  if (write_report) write_file(prepare_out(o.out) / "verify_report.txt", report);
  return all_passed ? kExitOk : kExitChecksFailed;
}

// Trace and norms per preset; "d" presets expand into scale 0, 1, 3 members
// plus a sweep file.
int run_reproduce(const Options& o) {
  const fs::path out = prepare_out(o.out);
  const std::string names = read_text([](char* b, size_t c, size_t* n) {
    return isslab_preset_names(b, c, n);
  });
  std::istringstream lines(names);
  std::string preset;
  while (std::getline(lines, preset)) {
    Options po = o;
    po.config.clear();
    po.preset = preset;
    po.amplitudes.clear();
    ScenarioPtr s = make_scenario(po, false);
    const std::string figure = preset.substr(preset.find("fig"));
    if (figure.back() != 'd') {
      simulate_into(s.get(), out, figure + "_", o, false);
    } else {
      const double scales[] = {0.0, 1.0, 3.0};
      for (double scale : scales) {
        ScenarioPtr member = make_scenario(po, false);
        set(member.get(), "scale", format_real(scale));
        // Keep the measurement channel off where the preset has none.
        if (figure.rfind("fig2", 0) == 0) set(member.get(), "a2", "0");
        simulate_into(member.get(), out,
                      figure + "_scale" + std::to_string(static_cast<int>(scale)) + "_", o, false);
      }
      std::vector<double> sup(3);
      check(isslab_sweep(s.get(), scales, 3, 1.0, 4.0, sup.data(),
                         (out / (figure + "_sweep.csv")).string().c_str()));
    }
    std::cout << "wrote " << figure << "\n";
  }
  return kExitOk;
}

void add_scenario_options(CLI::App* cmd, Options& o, bool sweep) {
  cmd->add_option("--preset", o.preset, "Reference preset (paper_fig1, paper_fig2a ... paper_fig5d)");
  cmd->add_option("--config", o.config, "key=value scenario file")->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
  cmd->add_option("--n", o.n, "Grid nodes");
  cmd->add_option("--dt", o.dt, "Time step");
  cmd->add_option("--t-end", o.t_end, "Horizon");
  cmd->add_option("--mode", o.mode,
                  "OpenLoop, StateFeedback, OutputFeedback, TargetDirect, ErrorDirect, "
                  "ObserverTargetDirect");
  cmd->add_option("--amplitudes", o.amplitudes,
                  sweep ? "Amplitude scales to sweep (default 0 1 3)"
                        : "One amplitude scale, or A A0 A1 A2");
  cmd->add_option("--set", o.settings, "Extra scenario setting key=value (repeatable)");
  cmd->add_option("--window", o.window, "Time window t_lo t_hi for decay fit or sweep")
      ->expected(2);
  cmd->add_option("--sigma", o.sigma, "Lyapunov weight rate (default half the reaction margin)");
  cmd->add_option("--r", o.r, "Lyapunov power")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Backstepping boundary control lab for a reaction-diffusion PDE"};
  app.footer(kExitHelp);
  app.require_subcommand(1);
  Options o;
  auto* kernels = app.add_subcommand("kernels", "Kernel grids k, l, m, n and residual report");
  auto* gains = app.add_subcommand("gains", "Observer gain p and K_p with metadata");
  auto* simulate = app.add_subcommand("simulate", "Run one scenario and write its trace");
  auto* sweep = app.add_subcommand("sweep", "Sup norm against disturbance amplitude");
  auto* verify = app.add_subcommand("verify", "Run the property suite");
  auto* reproduce = app.add_subcommand("reproduce-figs", "Traces and norms for every preset");
  for (auto* cmd : {kernels, gains, simulate, reproduce}) add_scenario_options(cmd, o, false);
  add_scenario_options(sweep, o, true);
  verify->add_option("--out", o.out, "Directory for verify_report.txt");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*kernels) return run_kernels(o);
    if (*gains) return run_gains(o);
    if (*simulate) return run_simulate(o);
    if (*sweep) return run_sweep(o);
    if (*verify) return run_verify(o, verify->count("--out") > 0);
    if (*reproduce) return run_reproduce(o);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.exit_code;
  }
  return kExitConfig;
}
