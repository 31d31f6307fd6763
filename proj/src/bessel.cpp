#include "sfr/bessel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace sfr {
namespace {

constexpr long double kEulerGamma = 0.577215664901532860606512090082402431L;

struct PQ {
  double p;
  double q;
};

// Hankel asymptotic series for order nu (mu = 4 nu^2), summed until the terms
// stop decreasing.
PQ hankel_pq(double x, double mu) {
  long double p = 0.0L, q = 0.0L;
  long double term = 1.0L;  // a_k / x^k with a_0 = 1
  long double prev = std::numeric_limits<long double>::infinity();
  for (int k = 0; k < 60; ++k) {
    if (k > 0) {
      const long double odd = 2.0L * k - 1.0L;
      term *= (mu - odd * odd) / (8.0L * k * x);
    }
    const long double mag = std::fabs(term);
    if (mag > prev) break;
    prev = mag;
    const long double signed_term = ((k / 2) % 2 == 0) ? term : -term;
    if (k % 2 == 0) {
      p += signed_term;
    } else {
      q += signed_term;
    }
    if (mag < 1e-20L) break;
  }
  return {static_cast<double>(p), static_cast<double>(q)};
}

long double j0_series(long double x) {
  const long double z = -0.25L * x * x;
  long double term = 1.0L, sum = 1.0L;
  for (int m = 1; m < 200; ++m) {
    term *= z / (static_cast<long double>(m) * m);
    sum += term;
    if (std::fabs(term) < 1e-22L * std::fabs(sum) && m > 2) break;
  }
  return sum;
}

long double j1_series(long double x) {
  const long double z = -0.25L * x * x;
  long double term = 0.5L * x, sum = term;
  for (int m = 1; m < 200; ++m) {
    term *= z / (static_cast<long double>(m) * (m + 1));
    sum += term;
    if (std::fabs(term) < 1e-22L * std::fabs(sum) && m > 2) break;
  }
  return sum;
}

}  // namespace

double bessel_j0(double x) {
  const double ax = std::fabs(x);
  if (ax <= kBesselSeriesLimit) return static_cast<double>(j0_series(ax));
  const auto [p, q] = hankel_pq(ax, 0.0);
  const double chi = ax - 0.25 * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * ax)) * (p * std::cos(chi) - q * std::sin(chi));
}

double bessel_j1(double x) {
  const double ax = std::fabs(x);
  const double sign = x < 0 ? -1.0 : 1.0;
  if (ax <= kBesselSeriesLimit) return sign * static_cast<double>(j1_series(ax));
  const auto [p, q] = hankel_pq(ax, 4.0);
  const double chi = ax - 0.75 * std::numbers::pi;
  return sign * std::sqrt(2.0 / (std::numbers::pi * ax)) *
         (p * std::cos(chi) - q * std::sin(chi));
}

double bessel_y0(double x) {
  if (!(x > 0.0)) throw std::domain_error("Y0 requires a positive argument");
  if (x <= kBesselSeriesLimit) {
    const long double lx = x;
    const long double z = 0.25L * lx * lx;
    long double term = 1.0L, harmonic = 0.0L, sum = 0.0L;
    for (int m = 1; m < 200; ++m) {
      term *= -z / (static_cast<long double>(m) * m);
      harmonic += 1.0L / m;
      const long double t = -term * harmonic;
      sum += t;
      if (std::fabs(t) < 1e-22L * std::fabs(sum) && m > 2) break;
    }
    const long double two_over_pi = 2.0L / std::numbers::pi_v<long double>;
    return static_cast<double>(two_over_pi * ((std::log(0.5L * lx) + kEulerGamma) * j0_series(lx) +
                                              sum));
  }
  const auto [p, q] = hankel_pq(x, 0.0);
  const double chi = x - 0.25 * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::sin(chi) + q * std::cos(chi));
}

std::complex<double> hankel1_0(double x) { return {bessel_j0(x), bessel_y0(x)}; }

}  // namespace sfr
