#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "isslab/isslab.h"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const char* name) {
  const fs::path dir = fs::temp_directory_path() / "isslab_capi_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("kernels through the C interface") {
  isslab_kernel* k = nullptr;
  REQUIRE(isslab_kernel_build(ISSLAB_KERNEL_K, 51, 25.0, 1.0, &k) == ISSLAB_OK);
  size_t n = 0;
  CHECK(isslab_kernel_size(k, &n) == ISSLAB_OK);
  CHECK(n == 51);
  double v = 1.0;
  CHECK(isslab_kernel_value(k, 0, 0, &v) == ISSLAB_OK);
  CHECK(v == 0.0);
  CHECK(isslab_kernel_value(k, 50, 50, &v) == ISSLAB_OK);
  CHECK(v == doctest::Approx(-12.5));
  CHECK(isslab_kernel_value(k, 3, 4, &v) == ISSLAB_E_DIMENSION);
  CHECK(std::string(isslab_last_error()).find("outside") != std::string::npos);

  isslab_kernel* l = nullptr;
  CHECK(isslab_kernel_invert(k, &l) == ISSLAB_OK);
  double interior = -1.0, bc = -1.0, diag = -1.0;
  CHECK(isslab_kernel_residual(l, &interior, &bc, &diag) == ISSLAB_OK);
  CHECK(interior >= 0.0);
  CHECK(diag < 1e-10);
  const fs::path csv = scratch("l.csv");
  CHECK(isslab_kernel_write_csv(l, csv.string().c_str()) == ISSLAB_OK);
  CHECK(slurp(csv).rfind("x,z,value\n", 0) == 0);
  CHECK(isslab_kernel_write_csv(l, "/nonexistent/dir/l.csv") == ISSLAB_E_IO);
  isslab_kernel_free(l);
  isslab_kernel_free(k);

  isslab_kernel* bad = nullptr;
  CHECK(isslab_kernel_build(9, 51, 25.0, 1.0, &bad) == ISSLAB_E_ARGUMENT);
  CHECK(isslab_kernel_build(ISSLAB_KERNEL_K, 51, -1.0, 1.0, &bad) == ISSLAB_E_DOMAIN);
  CHECK(bad == nullptr);
  CHECK(isslab_kernel_size(nullptr, &n) == ISSLAB_E_ARGUMENT);
  isslab_kernel_free(nullptr);
}

TEST_CASE("gains through the C interface") {
  int valid = 0;
  double margin = 0.0;
  CHECK(isslab_p0_validate(100.0, 1.0, 1.0, &valid, &margin) == ISSLAB_OK);
  CHECK(valid == 1);
  CHECK(margin == 100.5);

  isslab_kernel *m = nullptr, *k = nullptr;
  REQUIRE(isslab_kernel_build(ISSLAB_KERNEL_M, 41, 25.0, 1.0, &m) == ISSLAB_OK);
  REQUIRE(isslab_kernel_build(ISSLAB_KERNEL_K, 41, 25.0, 1.0, &k) == ISSLAB_OK);
  isslab_gains* g = nullptr;
  CHECK(isslab_gains_solve(m, 1.0, 1.0, &g) == ISSLAB_E_DOMAIN);
  REQUIRE(isslab_gains_solve(m, 12.0, 1.0, &g) == ISSLAB_OK);
  std::vector<double> p(41), kp(41);
  CHECK(isslab_gains_copy(g, p.data(), kp.data(), 41) == ISSLAB_E_DOMAIN);
  CHECK(isslab_gains_compute_kp(g, k) == ISSLAB_OK);
  CHECK(isslab_gains_copy(g, p.data(), kp.data(), 41) == ISSLAB_OK);
  CHECK(kp[0] == p[0]);
  CHECK(isslab_gains_copy(g, p.data(), nullptr, 40) == ISSLAB_E_DIMENSION);
  double residual = 1.0;
  int iterations = 0;
  CHECK(isslab_gains_info(g, &residual, &iterations) == ISSLAB_OK);
  CHECK(residual < 1e-10);
  CHECK(iterations > 0);
  const fs::path csv = scratch("gains.csv"), meta = scratch("gains_meta.txt");
  CHECK(isslab_gains_write(g, csv.string().c_str(), meta.string().c_str()) == ISSLAB_OK);
  CHECK(slurp(meta).find("b=") != std::string::npos);
  isslab_gains_free(g);
  isslab_kernel_free(m);
  isslab_kernel_free(k);
}

TEST_CASE("scenarios and simulations through the C interface") {
  isslab_scenario* s = nullptr;
  CHECK(isslab_scenario_preset("paper_fig9z", &s) == ISSLAB_E_CONFIG);
  REQUIRE(isslab_scenario_preset("paper_fig1", &s) == ISSLAB_OK);
  CHECK(isslab_scenario_set(s, "n", "51") == ISSLAB_OK);
  CHECK(isslab_scenario_set(s, "bogus", "1") == ISSLAB_E_CONFIG);
  double v = 0.0;
  CHECK(isslab_scenario_get(s, "n", &v) == ISSLAB_OK);
  CHECK(v == 51.0);
  CHECK(isslab_scenario_get(s, "t_end", &v) == ISSLAB_OK);
  CHECK(v == 1.0);
  CHECK(isslab_scenario_validate(s) == ISSLAB_OK);

  size_t needed = 0;
  CHECK(isslab_scenario_describe(s, nullptr, 0, &needed) == ISSLAB_OK);
  CHECK(needed > 20);
  char small[8];
  CHECK(isslab_scenario_describe(s, small, sizeof small, &needed) == ISSLAB_OK);
  CHECK(std::string(small) == "preset=");

  isslab_trace* t = nullptr;
  REQUIRE(isslab_simulate(s, &t) == ISSLAB_OK);
  size_t samples = 0, nodes = 0;
  CHECK(isslab_trace_size(t, &samples, &nodes) == ISSLAB_OK);
  CHECK(nodes == 51);
  std::vector<double> times(samples), linf(samples), field(nodes);
  CHECK(isslab_trace_norms(t, times.data(), linf.data(), samples) == ISSLAB_OK);
  CHECK(times.back() == doctest::Approx(1.0));
  CHECK(linf.back() > 10.0 * linf.front());
  CHECK(isslab_trace_field(t, 0, field.data(), nodes) == ISSLAB_OK);
  CHECK(isslab_trace_norms(t, times.data(), linf.data(), samples + 1) == ISSLAB_E_DIMENSION);
  const fs::path trace = scratch("trace.csv"), norms = scratch("norms.csv");
  CHECK(isslab_trace_write(t, trace.string().c_str(), norms.string().c_str()) == ISSLAB_OK);
  CHECK(slurp(norms).rfind("t,linf_u\n", 0) == 0);
  double sigma = 0.0;
  CHECK(isslab_trace_fit_decay(t, 0.2, 1.0, &sigma, nullptr, nullptr) == ISSLAB_OK);
  CHECK(sigma < 0.0);
  isslab_trace_free(t);

  CHECK(isslab_lyapunov(s, 0.0, 3.0, nullptr, nullptr) == ISSLAB_E_CONFIG);
  CHECK(isslab_scenario_set(s, "mode", "TargetDirect") == ISSLAB_OK);
  double increase = 1.0;
  CHECK(isslab_lyapunov(s, 0.0, 3.0, scratch("lyapunov.csv").string().c_str(), &increase) ==
        ISSLAB_OK);
  CHECK(increase <= 1e-8);

  CHECK(isslab_scenario_set(s, "mode", "StateFeedback") == ISSLAB_OK);
  const double scales[] = {0.0, 1.0, 3.0};
  double sup[3] = {};
  CHECK(isslab_sweep(s, scales, 3, 0.5, 1.0, sup, scratch("sweep.csv").string().c_str()) ==
        ISSLAB_OK);
  CHECK(sup[0] < sup[1]);
  CHECK(sup[1] < sup[2]);

  char names[512];
  CHECK(isslab_preset_names(names, sizeof names, &needed) == ISSLAB_OK);
  CHECK(std::string(names).find("paper_fig5d\n") != std::string::npos);
  isslab_scenario_free(s);
}

TEST_CASE("last error is per thread") {
  isslab_scenario* s = nullptr;
  CHECK(isslab_scenario_preset("unknown", &s) == ISSLAB_E_CONFIG);
  const std::string mine = isslab_last_error();
  CHECK_FALSE(mine.empty());
  std::string other = "unset";
  std::thread worker([&] { other = isslab_last_error(); });
  worker.join();
  CHECK(other.empty());
  CHECK(std::string(isslab_last_error()) == mine);
  CHECK(std::string(isslab_status_name(ISSLAB_E_DIVERGENCE)) == "divergence");
  CHECK(std::string(isslab_status_name(42)) == "unknown status");
}
