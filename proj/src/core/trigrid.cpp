#include "isslab/trigrid.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "isslab/error.hpp"
#include "isslab/numfmt.hpp"

namespace isslab {

std::string_view kernel_kind_name(KernelKind kind) {
  switch (kind) {
    case KernelKind::kK: return "k";
    case KernelKind::kL: return "l";
    case KernelKind::kM: return "m";
    case KernelKind::kN: return "n";
  }
  return "?";
}

TriGrid::TriGrid(KernelKind kind, std::size_t n, double c0, double q)
    : kind_(kind), n_(n), c0_(c0), q_(q), values_(n * (n + 1) / 2, 0.0) {
  if (n < 3) throw DomainError("TriGrid: need at least 3 nodes per edge");
  if (!(c0 > 0.0)) throw DomainError("TriGrid: c0 must be positive");
}

double TriGrid::extrapolated_past_diagonal(std::size_t i) const {
  const auto r = row(i);
  if (i >= 2) return 3.0 * r[i] - 3.0 * r[i - 1] + r[i - 2];
  if (i == 1) {
    // Row 1 has only two samples; go down column z = x_2 instead.
    if (n_ >= 6) {
      const auto& g = *this;
      return 4.0 * g(2, 2) - 6.0 * g(3, 2) + 4.0 * g(4, 2) - g(5, 2);
    }
    return 2.0 * r[1] - r[0];
  }
  return r[0];
}

double TriGrid::interpolate(double x, double z) const {
  if (!(z >= 0.0 && z <= x && x <= 1.0)) {
    throw DomainError("TriGrid::interpolate: point outside the triangle");
  }
  const double h = step();
  const std::size_t last = n_ - 1;
  std::size_t i = std::min(static_cast<std::size_t>(x / h), last - 1);
  std::size_t j = std::min(static_cast<std::size_t>(z / h), i);
  const double a = x / h - static_cast<double>(i);
  const double b = z / h - static_cast<double>(j);
  const auto& g = *this;
  if (j < i) {
    return (1 - a) * (1 - b) * g(i, j) + a * (1 - b) * g(i + 1, j) +
           (1 - a) * b * g(i, j + 1) + a * b * g(i + 1, j + 1);
  }
  // Diagonal cell: triangle (i,i), (i+1,i), (i+1,i+1) with b <= a.
  const double bb = std::min(b, a);
  return (1 - a) * g(i, i) + (a - bb) * g(i + 1, i) + bb * g(i + 1, i + 1);
}

double TriGrid::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool TriGrid::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

void write_grid_csv(const TriGrid& grid, std::ostream& out) {
  out << "x,z,value\n";
  for (std::size_t i = 0; i < grid.n(); ++i) {
    const std::string xs = format_double(grid.x(i));
    for (std::size_t j = 0; j <= i; ++j) {
      out << xs << ',' << format_double(grid.x(j)) << ','
          << format_double(grid(i, j)) << '\n';
    }
  }
}

}  // namespace isslab
