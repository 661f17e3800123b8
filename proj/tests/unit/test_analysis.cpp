#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>
#include <vector>

#include "isslab/analysis.hpp"
#include "isslab/error.hpp"
#include "isslab/kernels.hpp"

using namespace isslab;

namespace {

SimTrace zero_trace(std::size_t samples, std::size_t n) {
  SimTrace tr;
  tr.mode = Mode::kTargetDirect;
  for (std::size_t k = 0; k < samples; ++k) {
    tr.times.push_back(0.1 * static_cast<double>(k));
    tr.fields.push_back({std::vector<double>(n, 0.0), tr.times.back()});
    tr.linf.push_back(0.0);
  }
  return tr;
}

}  // namespace

TEST_CASE("sup-norm series") {
  const NormSeries z = linf_series(zero_trace(4, 5));
  CHECK(z.norms == std::vector<double>(4, 0.0));
  SimTrace one = zero_trace(1, 3);
  one.fields[0].values = {0.0, -2.0, 1.0};
  CHECK(linf_series(one).norms[0] == 2.0);
  CHECK_THROWS_AS(linf_series(SimTrace{}), DomainError);
  CHECK_THROWS_AS(linf_series(one, NormKind::kError), DomainError);
  CHECK(default_norm(Mode::kOutputFeedback) == NormKind::kPrimaryPlusError);
  CHECK(default_norm(Mode::kStateFeedback) == NormKind::kPrimary);
}

TEST_CASE("decay fits") {
  std::vector<double> t, expo, flat;
  for (int k = 0; k <= 50; ++k) {
    t.push_back(0.05 * k);
    expo.push_back(std::exp(-2.0 * t.back()));
    flat.push_back(3.0);
  }
  const DecayFit e = fit_decay_rate(t, expo, 0.5, 2.0);
  CHECK(std::abs(e.sigma - 2.0) < 1e-10);
  CHECK(e.residual < 1e-10);
  CHECK(e.points == 31);
  CHECK(std::abs(fit_decay_rate(t, flat, 0.0, 2.5).sigma) < 1e-12);
  expo[20] = 0.0;
  CHECK_THROWS_AS(fit_decay_rate(t, expo, 0.5, 2.0), DomainError);
  CHECK_THROWS_AS(fit_decay_rate(t, flat, 0.51, 0.52), DomainError);

  std::ostringstream report;
  write_decay_report(e, report);
  CHECK(report.str().find("window=") != std::string::npos);
  CHECK(report.str().find("slope=") != std::string::npos);
  CHECK(report.str().find("residual=") != std::string::npos);
}

TEST_CASE("reference closed loops decay above the theory floor") {
  const Scenario sf = make_preset("paper_fig2a");
  const SimTrace u = simulate(sf);
  const NormSeries series = linf_series(u);
  const DecayFit fit = fit_decay_rate(series.times, series.norms, 0.5, 2.0);
  CHECK(fit.sigma >= 1.0);
  for (std::size_t k = 1; k < series.times.size(); ++k) {
    if (series.times[k] > 0.5 && series.times[k] <= 2.5) CHECK(series.norms[k] < series.norms[k - 1]);
  }
  const SimTrace e = simulate(make_preset("paper_fig3a"));
  const NormSeries es = linf_series(e);
  CHECK(fit_decay_rate(es.times, es.norms, 0.5, 2.0).sigma >= 1.0);
}

TEST_CASE("amplitude sweeps") {
  Scenario s = make_preset("paper_fig2d");
  s.n = 101;
  const Design d = build_design(s);
  const double zero[] = {0.0};
  CHECK(iss_sweep(s, d, zero, 1.0, 4.0, NormKind::kPrimary).sup_norms[0] < 1e-3);
  const double twice[] = {1.0, 1.0};
  const SweepResult same = iss_sweep(s, d, twice, 1.0, 4.0, NormKind::kPrimary);
  CHECK(same.sup_norms[0] == same.sup_norms[1]);
  const double unsorted[] = {3.0, 1.0};
  CHECK_THROWS_AS(iss_sweep(s, d, unsorted, 1.0, 4.0, NormKind::kPrimary), DomainError);
  CHECK_THROWS_AS(iss_sweep(s, d, zero, 1.0, 5.0, NormKind::kPrimary), DomainError);

  std::ostringstream csv;
  write_sweep_csv(same, csv);
  CHECK(csv.str().rfind("scale,sup_norm\n1,", 0) == 0);
}

TEST_CASE("sweep worker count honours the environment") {
  setenv("ISSLAB_THREADS", "3", 1);
  CHECK(sweep_threads() == 3);
  setenv("ISSLAB_THREADS", "0", 1);
  CHECK(sweep_threads() >= 1);
  unsetenv("ISSLAB_THREADS");
  CHECK(sweep_threads() >= 1);
}

TEST_CASE("Lyapunov functionals") {
  CHECK(truncated_power_integral(-1.0, 3.0) == 0.0);
  CHECK(truncated_power_integral(0.0, 3.0) == 0.0);
  CHECK(truncated_power_integral(2.0, 3.0) == doctest::Approx(4.0));

  const SimTrace z = zero_trace(5, 11);
  const LyapunovSeries v = lyapunov_monitor(z, 0.5, 3.0, 1.0, 1.9);
  for (double x : v.upper) CHECK(x == 0.0);
  for (double x : v.lower) CHECK(x == 0.0);
  CHECK_THROWS_AS(lyapunov_monitor(z, 2.0, 3.0, 1.0, 1.9), DomainError);
  CHECK_THROWS_AS(lyapunov_monitor(z, 0.0, 3.0, 1.0, 1.9), DomainError);
  CHECK_THROWS_AS(lyapunov_monitor(z, 0.5, 1.0, 1.0, 1.9), DomainError);

  Scenario s = make_preset("paper_fig2b");
  s.mode = Mode::kTargetDirect;
  s.n = 101;
  s.t_end = 2.0;
  s.output_stride = 1;
  const Design d = build_design(s);
  const SimTrace w = simulate(s, d);
  const double sigma = 0.5 * s.underline_c();
  const double bound = lyapunov_bound(s, d, sigma);
  const LyapunovSeries compliant = lyapunov_monitor(w, sigma, 3.0, bound, s.underline_c());
  CHECK(max_increase(compliant.upper) <= 1e-8);
  CHECK(max_increase(compliant.lower) <= 1e-8);
  const LyapunovSeries huge = lyapunov_monitor(w, sigma, 3.0, 1e12, s.underline_c());
  for (double x : huge.upper) CHECK(x == 0.0);
  // Below the bound the functionals pick up mass.
  const LyapunovSeries low = lyapunov_monitor(w, sigma, 3.0, 0.01, s.underline_c());
  CHECK(*std::max_element(low.upper.begin(), low.upper.end()) > 0.0);

  std::ostringstream csv;
  write_lyapunov_csv(compliant, csv);
  CHECK(csv.str().rfind("t,V_upper,V_lower\n", 0) == 0);
}

TEST_CASE("step increase helper") {
  const std::vector<double> falling = {3.0, 2.0, 1.5};
  const std::vector<double> bumpy = {3.0, 2.0, 2.25};
  CHECK(max_increase(falling) == -0.5);
  CHECK(max_increase(bumpy) == 0.25);
}

TEST_CASE("transform consistency") {
  const TriGrid k = build_grid(KernelKind::kK, 11, 13.0 * std::numbers::pi * std::numbers::pi / 5.0, 1.0);
  const SimTrace u = zero_trace(3, 11);
  SimTrace w = zero_trace(3, 11);
  CHECK(transform_consistency(u, w, k) == 0.0);
  for (auto& f : w.fields) {
    for (double& v : f.values) v += 0.125;
  }
  CHECK(transform_consistency(u, w, k) == 0.125);
  CHECK_THROWS_AS(transform_consistency(u, zero_trace(2, 11), k), DimensionError);
  CHECK_THROWS_AS(transform_consistency(u, zero_trace(3, 9), k), DimensionError);
  CHECK(trace_distance(u.fields, w.fields) == 0.125);
}
