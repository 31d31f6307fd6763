#pragma once

// Helmholtz-equation loss of a bicubic spline interpolant,
//   L_H = (1 / S) * integral over the region of |(Delta + k^2) u(x, y)|^2,
// evaluated in closed form per square patch of side l from the coefficient
// matrix A and three Gram matrices of g(z) = [1, z, z^2, z^3]^T on [0, l]:
//   C1 = int g g^T,  C2 = int g'' g''^T,  C3 = int g'' g^T.
// Every term has the form sum[(A P A^T) o W] with o the element-wise product.

#include "sfr/core.hpp"
#include "sfr/quadrature.hpp"
#include "sfr/spline.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace sfr {

template <typename Scalar>
struct CMatricesT {
  Matrix4T<Scalar> c1;
  Matrix4T<Scalar> c2;
  Matrix4T<Scalar> c3;
  Scalar spacing;
};
using CMatrices = CMatricesT<double>;

template <typename Scalar = double>
CMatricesT<Scalar> c_matrices(Scalar l) {
  if (!(l > Scalar(0)) || !std::isfinite(double(l))) {
    throw std::invalid_argument("patch side length must be positive");
  }
  std::array<Scalar, 8> lp{};
  lp[0] = 1;
  for (std::size_t n = 1; n < lp.size(); ++n) lp[n] = lp[n - 1] * l;

  CMatricesT<Scalar> cm;
  cm.spacing = l;
  for (int m = 0; m < 4; ++m) {
    for (int n = 0; n < 4; ++n) {
      cm.c1(m, n) = lp[static_cast<std::size_t>(m + n + 1)] / Scalar(m + n + 1);
    }
  }
  cm.c2.setZero();
  cm.c2(2, 2) = 4 * lp[1];
  cm.c2(2, 3) = 6 * lp[2];
  cm.c2(3, 2) = 6 * lp[2];
  cm.c2(3, 3) = 12 * lp[3];
  cm.c3.setZero();
  cm.c3.row(2) << 2 * lp[1], lp[2], 2 * lp[3] / 3, lp[4] / 2;
  cm.c3.row(3) << 3 * lp[2], 2 * lp[3], 3 * lp[4] / 2, 6 * lp[5] / 5;
  return cm;
}

namespace detail {

// (inner, weight, coefficient) of each of the six quadratic terms.
template <typename Scalar>
struct HeTerm {
  Matrix4T<Scalar> inner;
  Matrix4T<Scalar> weight;
  Scalar coeff;
};

template <typename Scalar>
std::array<HeTerm<Scalar>, 6> he_terms(const CMatricesT<Scalar>& cm, Scalar k) {
  const Scalar k2 = k * k;
  return {{
      {cm.c1, cm.c2, Scalar(1)},                       // (u_xx)^2
      {cm.c2, cm.c1, Scalar(1)},                       // (u_yy)^2
      {cm.c1, cm.c1, k2 * k2},                         // (k^2 u)^2
      {cm.c3.transpose(), cm.c3, Scalar(2)},           // 2 u_xx u_yy
      {cm.c3, cm.c1, 2 * k2},                          // 2 k^2 u u_yy
      {cm.c1, cm.c3.transpose(), 2 * k2},              // 2 k^2 u u_xx
  }};
}

}  // namespace detail

/// One term of the closed-form patch integral, indexed 0..5 in the order
/// (u_xx)^2, (u_yy)^2, k^4 u^2, 2 u_xx u_yy, 2 k^2 u u_yy, 2 k^2 u u_xx.
template <typename Scalar>
Scalar patch_he_term(const Matrix4T<Scalar>& A, const CMatricesT<Scalar>& cm, Scalar k,
                     int term) {
  const auto t = detail::he_terms(cm, k)[static_cast<std::size_t>(term)];
  return t.coeff * (A * t.inner * A.transpose()).cwiseProduct(t.weight).sum();
}

/// Integral of |(Delta + k^2) g(x)^T A g(y)|^2 over one l x l patch.
template <typename Scalar>
Scalar patch_he_integral(const Matrix4T<Scalar>& A, const CMatricesT<Scalar>& cm, Scalar k) {
  Scalar acc = 0;
  for (const auto& t : detail::he_terms(cm, k)) {
    acc += t.coeff * (A * t.inner * A.transpose()).cwiseProduct(t.weight).sum();
  }
  return acc;
}

/// d(patch_he_integral)/dA.
template <typename Scalar>
Matrix4T<Scalar> patch_he_gradient(const Matrix4T<Scalar>& A, const CMatricesT<Scalar>& cm,
                                   Scalar k) {
  Matrix4T<Scalar> g = Matrix4T<Scalar>::Zero();
  for (const auto& t : detail::he_terms(cm, k)) {
    g += t.coeff * (t.weight * A * t.inner.transpose() + t.weight.transpose() * A * t.inner);
  }
  return g;
}

/// Patch-wise closed-form integral of one part, summed in patch order.
template <typename Scalar>
Scalar he_integral(const SplinePatchSet<Scalar>& s, Scalar k) {
  const auto cm = c_matrices<Scalar>(Scalar(s.grid().spacing()));
  Scalar acc = 0;
  for (const auto& A : s.coeffs()) acc += patch_he_integral(A, cm, k);
  return acc;
}

/// Area-normalized Helmholtz residual energy of a spline field.
inline double he_loss(const SplineField& field, double k) {
  const double area = field.re.grid().area();
  return (he_integral(field.re, k) + he_integral(field.im, k)) / area;
}

/// The same quantity by tensor Gauss-Legendre quadrature on every patch.
/// Exact (to roundoff) for points_per_axis >= 4.
inline double he_loss_quadrature(const SplineField& field, double k, int points_per_axis) {
  if (points_per_axis < 1) throw std::invalid_argument("need at least one quadrature point");
  const Grid& grid = field.re.grid();
  const double l = grid.spacing();
  const GaussLegendre gl(points_per_axis, 0.0, l);
  const double k2 = k * k;
  double acc = 0.0;
  for (const auto* part : {&field.re, &field.im}) {
    for (int i = 0; i < part->patch_rows(); ++i) {
      for (int j = 0; j < part->patch_cols(); ++j) {
        const Matrix4T<double>& A = part->patch(i, j);
        for (std::size_t a = 0; a < gl.nodes.size(); ++a) {
          const Vector4T<double> gx = detail::basis_derivative(gl.nodes[a], 0);
          const Vector4T<double> gxx = detail::basis_derivative(gl.nodes[a], 2);
          for (std::size_t b = 0; b < gl.nodes.size(); ++b) {
            const Vector4T<double> gy = detail::basis_derivative(gl.nodes[b], 0);
            const Vector4T<double> gyy = detail::basis_derivative(gl.nodes[b], 2);
            const double r = gxx.dot(A * gy) + gx.dot(A * gyy) + k2 * gx.dot(A * gy);
            acc += gl.weights[a] * gl.weights[b] * r * r;
          }
        }
      }
    }
  }
  return acc / grid.area();
}

/// L_H of an output tensor (spline fit followed by he_loss).
inline double he_loss(const OutputTensor& out, const Grid& grid, double k) {
  return he_loss(interpolate_output(out, grid), k);
}

/// Gradient of L_H with respect to every entry of the output tensor. Entries
/// of the derivative planes outside their constraint sets get zero.
inline OutputTensor he_loss_gradient(const OutputTensor& out, const Grid& grid, double k) {
  const auto cm = c_matrices(grid.spacing());
  const double inv_area = 1.0 / grid.area();
  OutputTensor grad(grid.rows(), grid.cols());
  for (int part = 0; part < 2; ++part) {
    const auto patches = fit_spline(spline_input(out, part == 1), grid);
    std::vector<Matrix4T<double>> coeff_bar;
    coeff_bar.reserve(patches.coeffs().size());
    for (const auto& A : patches.coeffs()) {
      coeff_bar.push_back(inv_area * patch_he_gradient<double>(A, cm, k));
    }
    const auto in_bar = fit_spline_adjoint(coeff_bar, grid);
    grad[kURe + part] = in_bar.values;
    grad[kUxRe + part] = in_bar.ux;
    grad[kUyRe + part] = in_bar.uy;
    grad[kUxyRe + part] = in_bar.uxy;
  }
  return grad;
}

}  // namespace sfr
