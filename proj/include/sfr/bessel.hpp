#pragma once

#include <complex>

namespace sfr {

/// Bessel functions of the first and second kind, orders 0 and 1, for real
/// arguments. Power series up to |x| = 12, Hankel asymptotic expansion beyond.
double bessel_j0(double x);
double bessel_j1(double x);
/// Requires x > 0.
double bessel_y0(double x);

/// H_0^(1)(x) = J0(x) + j Y0(x), x > 0.
std::complex<double> hankel1_0(double x);

inline constexpr double kBesselSeriesLimit = 12.0;

}  // namespace sfr
