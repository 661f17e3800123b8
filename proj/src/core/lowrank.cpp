#include "isslab/lowrank.hpp"

#include <cmath>
#include <numeric>
#include <utility>

#include "isslab/error.hpp"

namespace isslab {

LowRankTridiagonal::LowRankTridiagonal(std::size_t size)
    : lower_(size, 0.0),
      diag_(size, 0.0),
      upper_(size, 0.0),
      c_prime_(size, 0.0),
      inv_pivot_(size, 0.0) {}

void LowRankTridiagonal::add_correction(std::vector<double> column,
                                        std::vector<double> row) {
  if (column.size() != size() || row.size() != size()) {
    throw DimensionError("low-rank correction has the wrong length");
  }
  columns_.push_back(std::move(column));
  rows_.push_back(std::move(row));
}

void LowRankTridiagonal::factor() {
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    const double pivot = diag_[i] - (i > 0 ? lower_[i] * c_prime_[i - 1] : 0.0);
    if (pivot == 0.0 || !std::isfinite(pivot)) {
      throw Error(ErrorCode::kInternal, "tridiagonal solve hit a zero pivot");
    }
    inv_pivot_[i] = 1.0 / pivot;
    c_prime_[i] = upper_[i] * inv_pivot_[i];
  }

  const std::size_t r = columns_.size();
  z_ = columns_;
  for (auto& z : z_) thomas(z);

  capacitance_.assign(r * r, 0.0);
  for (std::size_t a = 0; a < r; ++a) {
    for (std::size_t b = 0; b < r; ++b) {
      capacitance_[a * r + b] =
          std::inner_product(rows_[a].begin(), rows_[a].end(), z_[b].begin(), 0.0) +
          (a == b ? 1.0 : 0.0);
    }
  }
  // In-place LU with partial pivoting.
  perm_.resize(r);
  std::iota(perm_.begin(), perm_.end(), std::size_t{0});
  for (std::size_t k = 0; k < r; ++k) {
    std::size_t best = k;
    for (std::size_t i = k + 1; i < r; ++i) {
      if (std::abs(capacitance_[i * r + k]) > std::abs(capacitance_[best * r + k])) best = i;
    }
    if (capacitance_[best * r + k] == 0.0) {
      throw Error(ErrorCode::kInternal, "low-rank capacitance matrix is singular");
    }
    if (best != k) {
      for (std::size_t j = 0; j < r; ++j) {
        std::swap(capacitance_[k * r + j], capacitance_[best * r + j]);
      }
      std::swap(perm_[k], perm_[best]);
    }
    for (std::size_t i = k + 1; i < r; ++i) {
      const double factor = capacitance_[i * r + k] / capacitance_[k * r + k];
      capacitance_[i * r + k] = factor;
      for (std::size_t j = k + 1; j < r; ++j) {
        capacitance_[i * r + j] -= factor * capacitance_[k * r + j];
      }
    }
  }
}

void LowRankTridiagonal::thomas(std::span<double> x) const {
  const std::size_t n = size();
  x[0] *= inv_pivot_[0];
  for (std::size_t i = 1; i < n; ++i) {
    x[i] = (x[i] - lower_[i] * x[i - 1]) * inv_pivot_[i];
  }
  for (std::size_t i = n - 1; i-- > 0;) x[i] -= c_prime_[i] * x[i + 1];
}

void LowRankTridiagonal::solve(std::span<double> rhs) const {
  if (rhs.size() != size()) throw DimensionError("right-hand side has the wrong length");
  thomas(rhs);
  const std::size_t r = columns_.size();
  if (r == 0) return;

  std::vector<double> y(r);
  for (std::size_t a = 0; a < r; ++a) {
    y[a] = std::inner_product(rows_[a].begin(), rows_[a].end(), rhs.begin(), 0.0);
  }
  std::vector<double> s(r);
  for (std::size_t i = 0; i < r; ++i) s[i] = y[perm_[i]];
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < i; ++j) s[i] -= capacitance_[i * r + j] * s[j];
  }
  for (std::size_t i = r; i-- > 0;) {
    for (std::size_t j = i + 1; j < r; ++j) s[i] -= capacitance_[i * r + j] * s[j];
    s[i] /= capacitance_[i * r + i];
  }
  for (std::size_t a = 0; a < r; ++a) {
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] -= z_[a][i] * s[a];
  }
}

}  // namespace isslab
