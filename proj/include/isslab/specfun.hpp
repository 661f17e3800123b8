#pragma once

// Bessel functions of order 0 and 1 for real nonnegative arguments, as needed
// by the closed-form backstepping kernels. Supported range is 0 <= s <= 60.
//
// Accuracy (checked against libstdc++'s cyl_bessel_* and exact-rational
// series in the tests):
//   I0, I1, i1_over_s : relative error < 1e-13 (positive series, no
//                       cancellation).
//   J0, J1            : absolute error < 1e-14. Power series for s <= 8,
//                       Miller backward recurrence above.
//   j1_over_s         : absolute error < 1e-15 for s <= 8, and J1(s)/s above.

namespace isslab::specfun {

inline constexpr double kMaxArgument = 60.0;

double bessel_i0(double s);
double bessel_i1(double s);
double bessel_j0(double s);
double bessel_j1(double s);

/// I1(s)/s with the limit 1/2 at s = 0, evaluated from the series directly.
double i1_over_s(double s);

/// J1(s)/s with the limit 1/2 at s = 0.
double j1_over_s(double s);

/// (1/s) * d/ds [J1(s)/s] = J0(s)/s^2 - 2 J1(s)/s^3, limit -1/8 at s = 0.
double j1_over_s_slope(double s);

}  // namespace isslab::specfun
