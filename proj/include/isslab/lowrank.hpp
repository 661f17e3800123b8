#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace isslab {

/// Solves (T + sum_k c_k r_k^T) x = b where T is tridiagonal and the rank of
/// the correction is small, via the Sherman-Morrison-Woodbury identity. The
/// corrections are fixed once added; T may change between factorizations.
class LowRankTridiagonal {
 public:
  explicit LowRankTridiagonal(std::size_t size);

  std::size_t size() const { return diag_.size(); }

  /// lower[i] multiplies x[i-1] in row i, upper[i] multiplies x[i+1].
  std::span<double> lower() { return lower_; }
  std::span<double> diag() { return diag_; }
  std::span<double> upper() { return upper_; }

  void add_correction(std::vector<double> column, std::vector<double> row);

  /// Factors T and the capacitance matrix. Throws on a zero pivot.
  void factor();

  /// Overwrites `rhs` with the solution. Requires factor().
  void solve(std::span<double> rhs) const;

 private:
  void thomas(std::span<double> x) const;

  std::vector<double> lower_, diag_, upper_;
  // Thomas factors.
  std::vector<double> c_prime_, inv_pivot_;
  std::vector<std::vector<double>> columns_, rows_;
  // T^{-1} c_k and the LU-factored capacitance I + R^T T^{-1} C.
  std::vector<std::vector<double>> z_;
  std::vector<double> capacitance_;
  std::vector<std::size_t> perm_;
};

}  // namespace isslab
