#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "isslab/error.hpp"
#include "isslab/kernels.hpp"
#include "isslab/specfun.hpp"
#include "isslab/transforms.hpp"

using namespace isslab;

namespace {

constexpr double kPi = std::numbers::pi;
const double kC0 = 13.0 * kPi * kPi / 5.0;

// Independent solve of k_xx - k_zz = c0 k, k(x,x) = -c0 x/2, k_z(x,0) = q k(x,0)
// in characteristic coordinates xi = x + z, eta = x - z, where the equation
// reads G_{xi eta} = c0/4 G. Successive approximation of
//   G_xi(xi, eta) = -c0/4 + c0/4 int_0^eta G(xi, s) ds,
//   G(eta, eta)   = int_0^eta e^{-q (eta - s)} 2 G_xi(s, s) ds,
//   G(xi, eta)    = G(eta, eta) + int_eta^xi G_xi(t, eta) dt,
// trapezoid in both directions on step 1/N.
struct CharacteristicOracle {
  std::size_t n;
  std::vector<std::vector<double>> g;

  CharacteristicOracle(std::size_t steps, double c0, double q) : n(steps) {
    const double h = 1.0 / static_cast<double>(n);
    g.assign(n + 1, std::vector<double>(n + 1, 0.0));
    std::vector<std::vector<double>> gx(n + 1, std::vector<double>(n + 1, 0.0));
    const double decay = std::exp(-q * h);
    for (int iter = 0; iter < 200; ++iter) {
      for (std::size_t i = 0; i <= n; ++i) {
        double area = 0.0;
        gx[i][0] = -0.25 * c0;
        for (std::size_t j = 1; j <= i; ++j) {
          area += 0.5 * h * (g[i][j - 1] + g[i][j]);
          gx[i][j] = -0.25 * c0 + 0.25 * c0 * area;
        }
      }
      double change = 0.0;
      double phi = 0.0;
      for (std::size_t j = 0; j <= n; ++j) {
        if (j > 0) phi = decay * phi + h * (decay * gx[j - 1][j - 1] + gx[j][j]);
        double value = phi;
        for (std::size_t i = j; i <= n; ++i) {
          if (i > j) value += 0.5 * h * (gx[i - 1][j] + gx[i][j]);
          change = std::max(change, std::abs(value - g[i][j]));
          g[i][j] = value;
        }
      }
      if (change < 1e-13) return;
    }
    FAIL("characteristic oracle did not converge");
  }

  double k(double x, double z) const {
    const auto i = static_cast<std::size_t>(std::lround((x + z) * static_cast<double>(n)));
    const auto j = static_cast<std::size_t>(std::lround((x - z) * static_cast<double>(n)));
    return g[i][j];
  }
};

double richardson_k(double x, double z, double q) {
  const CharacteristicOracle coarse(200, kC0, q), fine(400, kC0, q);
  return (4.0 * fine.k(x, z) - coarse.k(x, z)) / 3.0;
}

double round_trip(KernelKind kind, std::size_t n) {
  const TriGrid d = build_grid(kind, n, kC0, 1.0);
  const TriGrid inv = invert_kernel(d);
  StateField u{std::vector<double>(n), 0.0};
  for (std::size_t i = 0; i < n; ++i) u.values[i] = std::sin(kPi * d.x(i));
  const StateField back = inverse_transform(forward_transform(u, d), inv);
  double e = 0.0;
  for (std::size_t i = 0; i < n; ++i) e = std::max(e, std::abs(back.values[i] - u.values[i]));
  return e;
}

}  // namespace

TEST_CASE("k closed form: trivial values") {
  CHECK(eval_k(0.0, 0.0, kC0, 1.0) == 0.0);
  for (double x : {0.25, 0.5, 1.0}) {
    CHECK(eval_k(x, x, kC0, 1.0) == doctest::Approx(-kC0 * x / 2.0).epsilon(1e-14));
  }
}

TEST_CASE("k closed form agrees with the characteristic-coordinate oracle") {
  const double k10 = eval_k(1.0, 0.0, kC0, 1.0);
  CHECK(std::abs(k10 - richardson_k(1.0, 0.0, 1.0)) < 1e-4);
  CHECK(std::abs(eval_k(0.5, 0.2, kC0, 1.0) - richardson_k(0.5, 0.2, 1.0)) < 1e-4);
  CHECK(std::abs(eval_k(0.8, 0.1, kC0, 2.5) - richardson_k(0.8, 0.1, 2.5)) < 1e-4);
}

TEST_CASE("k reduces to the Bessel term as q -> 0") {
  const double q = 1e-12;
  for (double x : {0.3, 1.0}) {
    const double bessel = -kC0 * x * specfun::i1_over_s(std::sqrt(kC0 * x * x));
    CHECK(eval_k(x, 0.0, kC0, q) == doctest::Approx(bessel).epsilon(1e-10));
  }
}

TEST_CASE("m closed form: boundary and diagonal values") {
  for (double z : {0.0, 0.3, 1.0}) CHECK(eval_m(1.0, z, kC0) == 0.0);
  for (double x : {0.0, 0.4, 0.9}) {
    CHECK(eval_m(x, x, kC0) == doctest::Approx(kC0 * (1.0 - x) / 2.0).epsilon(1e-15));
  }
  CHECK(eval_m(0.0, 0.0, kC0) == doctest::Approx(kC0 / 2.0));
}

TEST_CASE("analytic m_z(x, 0) matches a five-point difference") {
  const double h = 1e-3;
  for (double x : {0.05, 0.3, 0.6, 0.95, 1.0}) {
    auto m = [&](int k) { return eval_m(x, k * h, kC0); };
    const double fd = (-25.0 * m(0) + 48.0 * m(1) - 36.0 * m(2) + 16.0 * m(3) - 3.0 * m(4)) /
                      (12.0 * h);
    const double exact = eval_m_z_at_zero(x, kC0);
    CHECK(std::abs(fd - exact) < 1e-6 * std::max(1.0, std::abs(exact)));
  }
}

TEST_CASE("kernel evaluation rejects points outside the triangle") {
  CHECK_THROWS_AS(eval_k(0.5, 0.6, kC0, 1.0), DomainError);
  CHECK_THROWS_AS(eval_k(1.5, 0.0, kC0, 1.0), DomainError);
  CHECK_THROWS_AS(eval_k(0.5, -0.1, kC0, 1.0), DomainError);
  CHECK_THROWS_AS(eval_k(0.5, 0.1, kC0, 0.0), DomainError);
  CHECK_THROWS_AS(eval_m(0.5, 0.6, kC0), DomainError);
  CHECK_THROWS_AS(eval_m(0.5, 0.1, -1.0), DomainError);
}

TEST_CASE("grids: stored identities") {
  const TriGrid k = build_grid(KernelKind::kK, 101, kC0, 1.0);
  const TriGrid m = build_grid(KernelKind::kM, 101, kC0, 1.0);
  CHECK(k(0, 0) == 0.0);
  for (double v : m.row(100)) CHECK(v == 0.0);
  const TriGrid l = invert_kernel(k);
  const TriGrid nn = invert_kernel(m);
  for (std::size_t i = 0; i < 101; ++i) {
    CHECK(std::abs(k(i, i) + kC0 * k.x(i) / 2.0) <= 1e-10);
    CHECK(std::abs(l(i, i) + kC0 * l.x(i) / 2.0) <= 1e-10);
    CHECK(std::abs(m(i, i) - kC0 * (1.0 - m.x(i)) / 2.0) <= 1e-10);
    CHECK(std::abs(nn(i, i) - kC0 * (1.0 - nn.x(i)) / 2.0) <= 1e-10);
    CHECK(std::abs(nn(100, i)) <= 1e-10);
  }
  CHECK(l.kind() == KernelKind::kL);
  CHECK(nn.kind() == KernelKind::kN);
}

TEST_CASE("residuals: bounded and second order under refinement") {
  for (KernelKind kind : {KernelKind::kK, KernelKind::kM}) {
    const TriGrid g1 = build_grid(kind, 101, kC0, 1.0);
    const ResidualReport r1 = pde_residual(g1);
    const ResidualReport r2 = pde_residual(build_grid(kind, 201, kC0, 1.0));
    CHECK(r1.interior_max < 0.05 * g1.max_abs());
    const double ratio = r1.interior_max / r2.interior_max;
    CHECK(ratio >= 3.0);
    CHECK(ratio <= 5.0);
    if (kind == KernelKind::kM) CHECK(r1.bc_max == 0.0);
  }
  for (KernelKind kind : {KernelKind::kL, KernelKind::kN}) {
    const double a = pde_residual(build_grid(kind, 51, kC0, 1.0)).interior_max;
    const double b = pde_residual(build_grid(kind, 101, kC0, 1.0)).interior_max;
    const double c = pde_residual(build_grid(kind, 201, kC0, 1.0)).interior_max;
    CHECK(std::log2(b / c) >= 1.8);
    CHECK(b < a);
  }
  const TriGrid zero(KernelKind::kK, 21, kC0, 1.0);
  CHECK(pde_residual(zero).interior_max == 0.0);
  CHECK_THROWS_AS(pde_residual(TriGrid(KernelKind::kK, 4, kC0, 1.0)), DomainError);
}

TEST_CASE("inversion: zero fixed point and round trips") {
  const TriGrid zero(KernelKind::kK, 31, kC0, 1.0);
  const TriGrid inv = invert_kernel(zero);
  for (double v : inv.values()) CHECK(v == 0.0);
  InversionStats stats;
  invert_kernel(build_grid(KernelKind::kK, 51, kC0, 1.0), &stats);
  CHECK(stats.iterations > 0);
  CHECK(stats.last_change < 1e-12);
  for (KernelKind kind : {KernelKind::kK, KernelKind::kM}) {
    const double e51 = round_trip(kind, 51), e101 = round_trip(kind, 101);
    const double e201 = round_trip(kind, 201);
    CHECK(e201 < 1e-6);
    CHECK(std::log2(e51 / e101) >= 1.8);
    CHECK(std::log2(e101 / e201) >= 1.8);
  }
  CHECK_THROWS_AS(invert_kernel(inv), DomainError);
}

TEST_CASE("grid CSV export") {
  const TriGrid k = build_grid(KernelKind::kK, 5, kC0, 1.0);
  std::ostringstream out;
  write_grid_csv(k, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "x,z,value");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 15);
  CHECK(out.str().find("1,0,") != std::string::npos);
}
