#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace sfr {

/// Gauss-Legendre nodes and weights mapped to [a, b]. Exact for polynomials of
/// degree <= 2n - 1.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  GaussLegendre(int n, double a, double b) {
    if (n < 1) throw std::invalid_argument("quadrature needs at least one node");
    nodes.resize(static_cast<std::size_t>(n));
    weights.resize(static_cast<std::size_t>(n));
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (int k = 0; k < n; ++k) {
      // Newton iteration on P_n from the Chebyshev-like initial guess.
      double x = std::cos(M_PI * (k + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int m = 2; m <= n; ++m) {
          const double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
          p0 = p1;
          p1 = p2;
        }
        if (n == 1) p0 = 1.0;
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      double p0 = 1.0, p1 = x;
      for (int m = 2; m <= n; ++m) {
        const double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      nodes[static_cast<std::size_t>(k)] = mid + half * x;
      weights[static_cast<std::size_t>(k)] = half * 2.0 / ((1.0 - x * x) * dp * dp);
    }
  }

  template <typename F>
  double integrate(F&& f) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) acc += weights[k] * f(nodes[k]);
    return acc;
  }
};

}  // namespace sfr
