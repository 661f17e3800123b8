#include "isslab/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "isslab/error.hpp"
#include "isslab/quadrature.hpp"

namespace isslab {
namespace {

void check_match(std::size_t field_n, const TriGrid& kernel, const char* who) {
  if (field_n != kernel.n()) {
    throw DimensionError(std::string(who) + ": field has " +
                         std::to_string(field_n) + " nodes, kernel grid has " +
                         std::to_string(kernel.n()));
  }
}

StateField apply(const StateField& field, const TriGrid& kernel, double sign) {
  StateField out{field.values, field.time};
  for (std::size_t i = 1; i < field.n(); ++i) {
    out.values[i] += sign * row_integral(kernel, i, field.values);
  }
  return out;
}

}  // namespace

double StateField::linf() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

double row_integral(const TriGrid& kernel, std::size_t i,
                    std::span<const double> field) {
  const auto krow = kernel.row(i);
  auto sample = [&](std::size_t k) {
    if (k > i) return kernel.extrapolated_past_diagonal(i) * field[k];
    return krow[k] * field[k];
  };
  return quad::segment_integral(kernel.step(), i, sample, i + 1 < field.size());
}

StateField forward_transform(const StateField& field, const TriGrid& kernel) {
  check_match(field.n(), kernel, "forward_transform");
  return apply(field, kernel, -1.0);
}

StateField inverse_transform(const StateField& field,
                             const TriGrid& inverse_kernel) {
  check_match(field.n(), inverse_kernel, "inverse_transform");
  return apply(field, inverse_kernel, 1.0);
}

double control_state_feedback(const StateField& u, const TriGrid& k) {
  check_match(u.n(), k, "control_state_feedback");
  return row_integral(k, k.n() - 1, u.values);
}

double control_output_feedback(const StateField& u_hat, const TriGrid& k) {
  check_match(u_hat.n(), k, "control_output_feedback");
  return row_integral(k, k.n() - 1, u_hat.values);
}

}  // namespace isslab
