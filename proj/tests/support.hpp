#pragma once

// Shared oracles and fixtures for the unit tests.

#include "sfr/core.hpp"
#include "sfr/spline.hpp"

#include <cmath>
#include <functional>
#include <random>

namespace sfr::testing {

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

inline Plane random_plane(int rows, int cols, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Plane p(rows, cols);
  for (Eigen::Index c = 0; c < p.cols(); ++c)
    for (Eigen::Index r = 0; r < p.rows(); ++r) p(r, c) = u(rng);
  return p;
}

inline Matrix4T<double> random_matrix4(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix4T<double> a;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) a(r, c) = u(rng);
  return a;
}

inline OutputTensor random_output(const Grid& g, std::mt19937_64& rng) {
  OutputTensor out(g.rows(), g.cols());
  for (auto& c : out.channels) c = random_plane(g.rows(), g.cols(), rng);
  out.mask_derivatives();
  return out;
}

// Closed-form function with its derivatives, used to build exact spline input.
struct Analytic {
  std::function<double(double, double)> f, fx, fy, fxy;
};

inline SplineInput<double> exact_input(const Analytic& a, const Grid& g) {
  auto in = SplineInput<double>::zeros(g.rows(), g.cols());
  for (int i = 0; i < g.rows(); ++i) {
    for (int j = 0; j < g.cols(); ++j) {
      const double x = g.x(i), y = g.y(j);
      in.values(i, j) = a.f(x, y);
      in.ux(i, j) = a.fx(x, y);
      in.uy(i, j) = a.fy(x, y);
      in.uxy(i, j) = a.fxy(x, y);
    }
  }
  return in;
}

// Product of two univariate cubics p(x) q(y) with random coefficients.
struct CubicProduct {
  Vector4T<double> p, q;

  static CubicProduct random(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    CubicProduct c;
    for (int n = 0; n < 4; ++n) {
      c.p(n) = u(rng);
      c.q(n) = u(rng);
    }
    return c;
  }
  static double poly(const Vector4T<double>& c, double z, int order) {
    return detail::basis_derivative(z, order).dot(c);
  }
  Analytic analytic() const {
    auto self = *this;
    return {[self](double x, double y) { return poly(self.p, x, 0) * poly(self.q, y, 0); },
            [self](double x, double y) { return poly(self.p, x, 1) * poly(self.q, y, 0); },
            [self](double x, double y) { return poly(self.p, x, 0) * poly(self.q, y, 1); },
            [self](double x, double y) { return poly(self.p, x, 1) * poly(self.q, y, 1); }};
  }
};

}  // namespace sfr::testing
