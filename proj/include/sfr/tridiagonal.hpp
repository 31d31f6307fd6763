#pragma once

#include <Eigen/Dense>

#include <stdexcept>

namespace sfr {

template <typename Scalar>
using VectorT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Thomas algorithm for a tridiagonal system. `sub[0]` and `sup[n-1]` are
/// ignored. No pivoting: the system must be diagonally dominant.
template <typename Scalar>
VectorT<Scalar> solve_tridiagonal(const VectorT<Scalar>& sub, const VectorT<Scalar>& diag,
                                  const VectorT<Scalar>& sup, const VectorT<Scalar>& rhs) {
  const Eigen::Index n = diag.size();
  if (sub.size() != n || sup.size() != n || rhs.size() != n) {
    throw std::invalid_argument("tridiagonal operands differ in length");
  }
  VectorT<Scalar> c_star(n);
  VectorT<Scalar> x(n);
  if (n == 0) return x;
  c_star(0) = sup(0) / diag(0);
  x(0) = rhs(0) / diag(0);
  for (Eigen::Index i = 1; i < n; ++i) {
    const Scalar m = diag(i) - sub(i) * c_star(i - 1);
    c_star(i) = sup(i) / m;
    x(i) = (rhs(i) - sub(i) * x(i - 1)) / m;
  }
  for (Eigen::Index i = n - 2; i >= 0; --i) x(i) -= c_star(i) * x(i + 1);
  return x;
}

/// In-place solve of the constant symmetric (1, 4, 1) system that couples the
/// interior slopes of a uniform clamped cubic spline.
template <typename Scalar, typename Derived>
void solve_spline_system(Eigen::MatrixBase<Derived>& rhs) {
  const Eigen::Index n = rhs.size();
  if (n == 0) return;
  VectorT<Scalar> c_star(n);
  c_star(0) = Scalar(1) / Scalar(4);
  rhs(0) /= Scalar(4);
  for (Eigen::Index i = 1; i < n; ++i) {
    const Scalar m = Scalar(4) - c_star(i - 1);
    c_star(i) = Scalar(1) / m;
    rhs(i) = (rhs(i) - rhs(i - 1)) / m;
  }
  for (Eigen::Index i = n - 2; i >= 0; --i) rhs(i) -= c_star(i) * rhs(i + 1);
}

/// Node slopes of the uniform cubic spline through `values` with prescribed
/// end slopes. The returned vector holds `d_start` and `d_end` at its ends.
template <typename Scalar>
VectorT<Scalar> clamped_slopes(const VectorT<Scalar>& values, Scalar d_start, Scalar d_end,
                               Scalar h) {
  const Eigen::Index n = values.size();
  VectorT<Scalar> s(n);
  s(0) = d_start;
  s(n - 1) = d_end;
  if (n <= 2) return s;
  auto interior = s.segment(1, n - 2);
  const Scalar w = Scalar(3) / h;
  for (Eigen::Index i = 1; i + 1 < n; ++i) interior(i - 1) = w * (values(i + 1) - values(i - 1));
  interior(0) -= d_start;
  interior(n - 3) -= d_end;
  solve_spline_system<Scalar>(interior);
  return s;
}

/// Adjoint of clamped_slopes: given the sensitivity of each slope, accumulate
/// the sensitivities of the values and of the two end slopes.
template <typename Scalar>
void clamped_slopes_adjoint(const VectorT<Scalar>& slopes_bar, Scalar h,
                            VectorT<Scalar>& values_bar, Scalar& d_start_bar,
                            Scalar& d_end_bar) {
  const Eigen::Index n = slopes_bar.size();
  d_start_bar += slopes_bar(0);
  d_end_bar += slopes_bar(n - 1);
  if (n <= 2) return;
  VectorT<Scalar> rhs_bar = slopes_bar.segment(1, n - 2);
  solve_spline_system<Scalar>(rhs_bar);  // the system matrix is symmetric
  d_start_bar -= rhs_bar(0);
  d_end_bar -= rhs_bar(n - 3);
  const Scalar w = Scalar(3) / h;
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    values_bar(i + 1) += w * rhs_bar(i - 1);
    values_bar(i - 1) -= w * rhs_bar(i - 1);
  }
}

}  // namespace sfr
