#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "isslab/error.hpp"
#include "isslab/gains.hpp"
#include "isslab/kernels.hpp"

using namespace isslab;

namespace {

constexpr double kPi = std::numbers::pi;
const double kC0 = 13.0 * kPi * kPi / 5.0;
const double kP0 = 6.0 * kPi * kPi / 5.0;

}  // namespace

TEST_CASE("p0 admissibility") {
  const P0Check ref = validate_p0(kP0, kC0, 1.0);
  CHECK(ref.valid);
  CHECK(std::abs(ref.margin - (1.0 - kPi * kPi / 10.0)) <= 1e-12);
  const P0Check edge = validate_p0(0.0, 2.0, 1.0);
  CHECK_FALSE(edge.valid);
  CHECK(edge.margin == 0.0);
  const P0Check big = validate_p0(100.0, 1.0, 1.0);
  CHECK(big.valid);
  // 100 - (1/2 - 1).
  CHECK(big.margin == 100.5);
}

TEST_CASE("p for the reference constants") {
  const TriGrid m = build_grid(KernelKind::kM, 201, kC0, 1.0);
  const GainProfile g = solve_p(m, kP0, 1.0);
  CHECK(g.residual < 1e-10);
  CHECK(g.iterations > 1);
  CHECK(g.b == validate_p0(kP0, kC0, 1.0).margin);
  // m(1, .) = 0 and m_z(1, 0) = 0.
  CHECK(std::abs(g.p.back() + eval_m_z_at_zero(1.0, kC0)) < 1e-12);
  CHECK(gain_equation_residual(m, kP0, 1.0, g.p) == g.residual);

  const GainProfile from_zero = solve_p(m, kP0, 1.0, std::vector<double>(201, 0.0));
  for (std::size_t i = 0; i < g.n(); ++i) CHECK(std::abs(from_zero.p[i] - g.p[i]) < 1e-10);

  const GainProfile fine = solve_p(build_grid(KernelKind::kM, 401, kC0, 1.0), kP0, 1.0);
  double diff = 0.0;
  for (std::size_t i = 0; i < g.n(); ++i) diff = std::max(diff, std::abs(g.p[i] - fine.p[2 * i]));
  CHECK(diff < 1e-5);
}

TEST_CASE("p vanishes as the observer kernel vanishes") {
  // m_z is analytic in c0, so the zero kernel is reached as c0 -> 0.
  const TriGrid m = build_grid(KernelKind::kM, 51, 1e-200, 1.0);
  const GainProfile g = solve_p(m, 1.0, 1.0);
  for (double v : g.p) CHECK(std::abs(v) < 1e-150);
}

TEST_CASE("solve_p preconditions") {
  const TriGrid m = build_grid(KernelKind::kM, 51, kC0, 1.0);
  CHECK_THROWS_AS(solve_p(m, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(solve_p(build_grid(KernelKind::kK, 51, kC0, 1.0), kP0, 1.0), DomainError);
  CHECK_THROWS_AS(solve_p(m, kP0, 1.0, std::vector<double>(7, 0.0)), DimensionError);
}

TEST_CASE("K_p") {
  const TriGrid k = build_grid(KernelKind::kK, 201, kC0, 1.0);
  const TriGrid m = build_grid(KernelKind::kM, 201, kC0, 1.0);
  GainProfile g = solve_p(m, kP0, 1.0);
  const std::vector<double> kp = compute_kp(g, k);
  CHECK(kp[0] == g.p[0]);

  GainProfile zero = g;
  std::fill(zero.p.begin(), zero.p.end(), 0.0);
  const std::vector<double> kz = compute_kp(zero, k);
  for (std::size_t i = 0; i < kz.size(); ++i) CHECK(kz[i] == -kP0 * k(i, 0));

  // Doubled-resolution agreement, relative to the profile's scale.
  const GainProfile gf = solve_p(build_grid(KernelKind::kM, 401, kC0, 1.0), kP0, 1.0);
  const std::vector<double> kpf = compute_kp(gf, build_grid(KernelKind::kK, 401, kC0, 1.0));
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < kp.size(); ++i) {
    diff = std::max(diff, std::abs(kp[i] - kpf[2 * i]));
    scale = std::max(scale, std::abs(kp[i]));
  }
  CHECK(diff < 1e-5 * scale);

  CHECK_THROWS_AS(compute_kp(g, build_grid(KernelKind::kK, 101, kC0, 1.0)), DimensionError);
  CHECK_THROWS_AS(compute_kp(g, m), DomainError);
}

TEST_CASE("gain export") {
  GainProfile g = solve_p(build_grid(KernelKind::kM, 11, kC0, 1.0), kP0, 1.0);
  std::ostringstream csv, meta;
  write_gain_csv(g, csv);
  CHECK(csv.str().rfind("x,p,kp\n0,", 0) == 0);
  CHECK(csv.str().find(",\n") != std::string::npos);
  write_gain_metadata(g, meta);
  for (const char* key : {"p0=", "b=", "residual=", "iterations=", "n=11"}) {
    CHECK(meta.str().find(key) != std::string::npos);
  }
}
