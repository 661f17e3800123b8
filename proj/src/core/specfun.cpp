#include "isslab/specfun.hpp"

#include <cmath>
#include <string>

#include "isslab/error.hpp"

namespace isslab::specfun {
namespace {

constexpr int kMaxTerms = 120;
constexpr double kRelStop = 1e-18;
// Alternating series are only used where |J| <= 1, so an absolute stop works.
constexpr double kAbsStop = 1e-20;
constexpr double kSeriesLimitJ = 8.0;

void check_argument(double s, const char* name) {
  if (!std::isfinite(s) || s < 0.0 || s > kMaxArgument) {
    throw DomainError(std::string(name) + ": argument " + std::to_string(s) +
                      " outside [0, 60]");
  }
}

// sum_k sign^k (s/2)^(2k) / (k! (k+order)!) * scale_k, where the first term
// is `first` and the ratio of consecutive terms is sign*(s/2)^2/(k(k+order)).
double series(double s, double first, int order, double sign) {
  const double y = 0.25 * s * s;
  double term = first;
  double sum = first;
  for (int k = 1; k < kMaxTerms; ++k) {
    term *= sign * y / (static_cast<double>(k) * (k + order));
    sum += term;
    if (sign > 0.0) {
      if (term < kRelStop * sum) break;
    } else if (std::abs(term) < kAbsStop) {
      break;
    }
  }
  return sum;
}

struct J01 {
  double j0;
  double j1;
};

// Miller's backward recurrence J_{k-1} = (2k/s) J_k - J_{k+1}, normalized by
// J_0 + 2 sum_{k>=1} J_{2k} = 1. Used for s > 8 where the alternating series
// loses digits.
J01 miller(double s) {
  const int start = 2 * static_cast<int>(std::ceil((1.5 * s + 40.0) / 2.0));
  double next = 0.0;  // J_{k+1}
  double cur = 1e-300;  // J_k, arbitrary seed
  double norm = 0.0;
  double j1 = 0.0;
  double j0 = 0.0;
  for (int k = start; k >= 1; --k) {
    const double prev = (2.0 * k / s) * cur - next;  // J_{k-1}
    next = cur;
    cur = prev;
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * cur;
    if (k - 1 == 1) j1 = cur;
    if (std::abs(cur) > 1e250) {
      cur *= 1e-250;
      next *= 1e-250;
      norm *= 1e-250;
      j1 *= 1e-250;
    }
  }
  j0 = cur;
  norm += j0;
  return {j0 / norm, j1 / norm};
}

}  // namespace

double bessel_i0(double s) {
  check_argument(s, "bessel_i0");
  return series(s, 1.0, 0, 1.0);
}

double bessel_i1(double s) {
  check_argument(s, "bessel_i1");
  return series(s, 0.5 * s, 1, 1.0);
}

double i1_over_s(double s) {
  check_argument(s, "i1_over_s");
  return series(s, 0.5, 1, 1.0);
}

double bessel_j0(double s) {
  check_argument(s, "bessel_j0");
  if (s <= kSeriesLimitJ) return series(s, 1.0, 0, -1.0);
  return miller(s).j0;
}

double bessel_j1(double s) {
  check_argument(s, "bessel_j1");
  if (s <= kSeriesLimitJ) return series(s, 0.5 * s, 1, -1.0);
  return miller(s).j1;
}

double j1_over_s(double s) {
  check_argument(s, "j1_over_s");
  if (s <= kSeriesLimitJ) return series(s, 0.5, 1, -1.0);
  return miller(s).j1 / s;
}

double j1_over_s_slope(double s) {
  check_argument(s, "j1_over_s_slope");
  if (s <= kSeriesLimitJ) {
    // J1(s)/s = sum_k a_k s^(2k), a_k = (-1)^k / (2^(2k+1) k! (k+1)!), so the
    // slope divided by s is sum_{k>=1} 2k a_k s^(2k-2).
    const double y = s * s;
    double a = 0.5;  // a_0
    double pow = 1.0;  // s^(2k-2)
    double sum = 0.0;
    for (int k = 1; k < kMaxTerms; ++k) {
      a *= -1.0 / (4.0 * k * (k + 1));
      const double term = 2.0 * k * a * pow;
      sum += term;
      if (std::abs(term) < kAbsStop) break;
      pow *= y;
    }
    return sum;
  }
  const J01 j = miller(s);
  return j.j0 / (s * s) - 2.0 * j.j1 / (s * s * s);
}

}  // namespace isslab::specfun
