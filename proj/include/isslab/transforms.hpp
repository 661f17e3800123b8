#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "isslab/trigrid.hpp"

namespace isslab {

/// One spatial profile on the uniform grid x_i = i/(n-1).
struct StateField {
  std::vector<double> values;
  double time = 0.0;

  std::size_t n() const { return values.size(); }
  double linf() const;
};

/// int_0^{x_i} g(x_i, z) f(z) dz on the grid nodes of row i. This is the one
/// quadrature every transform, control law and gain computation goes through.
double row_integral(const TriGrid& kernel, std::size_t i,
                    std::span<const double> field);

/// w(x) = u(x) - int_0^x k(x,z) u(z) dz.
StateField forward_transform(const StateField& field, const TriGrid& kernel);

/// u(x) = w(x) + int_0^x l(x,z) w(z) dz.
StateField inverse_transform(const StateField& field,
                             const TriGrid& inverse_kernel);

/// U = int_0^1 k(1,z) u(z) dz. Shares row_integral with forward_transform,
/// so forward_transform(u)(1) == u(1) - U holds bit for bit.
double control_state_feedback(const StateField& u, const TriGrid& k);

/// Same law applied to the observer state.
double control_output_feedback(const StateField& u_hat, const TriGrid& k);

}  // namespace isslab
