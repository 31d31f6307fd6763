#pragma once

// Bicubic spline interpolation of a real plane from node values plus the
// boundary derivatives u_x (rows i = 0, I-1), u_y (columns j = 0, J-1) and
// the corner cross-derivatives u_xy.
//
// Patch (i, j) covers [x_i, x_{i+1}] x [y_j, y_{j+1}] and carries
//   h(x, y) = g(x - x_i)^T A g(y - y_j),   g(z) = [1, z, z^2, z^3]^T.
//
// Node derivatives are filled in by clamped 1D cubic-spline sweeps: u_x along
// x for every column j, u_y along y for every row i, u_xy along y on the two
// boundary rows (clamped by the corners) and then along x for every column.
// The result is the C^2 tensor-product spline; the map from inputs to
// coefficients is linear, and fit_spline_adjoint applies its transpose.

#include "sfr/core.hpp"
#include "sfr/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace sfr {

template <typename Scalar>
using Matrix4T = Eigen::Matrix<Scalar, 4, 4>;
template <typename Scalar>
using Vector4T = Eigen::Matrix<Scalar, 4, 1>;

/// Full Hermite data at every node: value, d/dx, d/dy, d2/dxdy.
template <typename Scalar>
struct NodeDerivatives {
  PlaneT<Scalar> f, fx, fy, fxy;
};

/// Boundary-constrained input to the spline fit. Only the constraint-set
/// entries of ux, uy and uxy are read.
template <typename Scalar>
struct SplineInput {
  PlaneT<Scalar> values, ux, uy, uxy;

  static SplineInput zeros(int rows, int cols) {
    const PlaneT<Scalar> z = PlaneT<Scalar>::Zero(rows, cols);
    return {z, z, z, z};
  }
};

/// Coefficients of all (I-1) x (J-1) patches of one real plane.
template <typename Scalar>
class SplinePatchSet {
 public:
  SplinePatchSet(const Grid& grid, std::vector<Matrix4T<Scalar>> coeffs)
      : grid_(grid), coeffs_(std::move(coeffs)) {
    if (static_cast<int>(coeffs_.size()) != patch_rows() * patch_cols()) {
      throw std::invalid_argument("patch count does not match the grid");
    }
  }

  const Grid& grid() const { return grid_; }
  int patch_rows() const { return grid_.rows() - 1; }
  int patch_cols() const { return grid_.cols() - 1; }
  int patch_count() const { return patch_rows() * patch_cols(); }

  const Matrix4T<Scalar>& patch(int i, int j) const {
    return coeffs_[static_cast<std::size_t>(i * patch_cols() + j)];
  }
  Matrix4T<Scalar>& patch(int i, int j) {
    return coeffs_[static_cast<std::size_t>(i * patch_cols() + j)];
  }
  const std::vector<Matrix4T<Scalar>>& coeffs() const { return coeffs_; }

 private:
  Grid grid_;
  std::vector<Matrix4T<Scalar>> coeffs_;
};

/// Interpolant of a complex field: one patch set per part.
template <typename Scalar>
struct SplineFieldT {
  SplinePatchSet<Scalar> re;
  SplinePatchSet<Scalar> im;
};
using SplineField = SplineFieldT<double>;

namespace detail {

// Maps 1D Hermite data [f0, f0', f1, f1'] on [0, l] to power-basis coefficients.
template <typename Scalar>
Matrix4T<Scalar> hermite_to_monomial(Scalar l) {
  const Scalar l2 = l * l;
  const Scalar l3 = l2 * l;
  Matrix4T<Scalar> h;
  h << 1, 0, 0, 0,
       0, 1, 0, 0,
       -3 / l2, -2 / l, 3 / l2, -1 / l,
       2 / l3, 1 / l2, -2 / l3, 1 / l2;
  return h;
}

template <typename Scalar>
Matrix4T<Scalar> hermite_block(const NodeDerivatives<Scalar>& n, int i, int j) {
  Matrix4T<Scalar> f;
  f << n.f(i, j), n.fy(i, j), n.f(i, j + 1), n.fy(i, j + 1),
       n.fx(i, j), n.fxy(i, j), n.fx(i, j + 1), n.fxy(i, j + 1),
       n.f(i + 1, j), n.fy(i + 1, j), n.f(i + 1, j + 1), n.fy(i + 1, j + 1),
       n.fx(i + 1, j), n.fxy(i + 1, j), n.fx(i + 1, j + 1), n.fxy(i + 1, j + 1);
  return f;
}

template <typename Scalar>
void check_input(const SplineInput<Scalar>& in, const Grid& grid) {
  for (const auto* p : {&in.values, &in.ux, &in.uy, &in.uxy}) {
    if (p->rows() != grid.rows() || p->cols() != grid.cols()) {
      throw std::invalid_argument("spline input shape does not match the grid");
    }
  }
  const int I = grid.rows();
  const int J = grid.cols();
  bool finite = in.values.allFinite() && in.ux.row(0).allFinite() &&
                in.ux.row(I - 1).allFinite() && in.uy.col(0).allFinite() &&
                in.uy.col(J - 1).allFinite();
  for (int i : {0, I - 1}) {
    for (int j : {0, J - 1}) finite = finite && std::isfinite(in.uxy(i, j));
  }
  if (!finite) throw std::invalid_argument("spline input is not finite");
}

inline double power(double z, int n) {
  double r = 1.0;
  for (int k = 0; k < n; ++k) r *= z;
  return r;
}

// Row vector of d^order/dz^order g(z).
template <typename Scalar>
Vector4T<Scalar> basis_derivative(Scalar z, int order) {
  Vector4T<Scalar> g = Vector4T<Scalar>::Zero();
  for (int n = order; n < 4; ++n) {
    Scalar falling = 1;
    for (int k = 0; k < order; ++k) falling *= Scalar(n - k);
    g(n) = falling * Scalar(power(double(z), n - order));
  }
  return g;
}

}  // namespace detail

/// Sweeps that complete the Hermite data at every node.
template <typename Scalar>
NodeDerivatives<Scalar> node_derivatives(const SplineInput<Scalar>& in, const Grid& grid) {
  detail::check_input(in, grid);
  const int I = grid.rows();
  const int J = grid.cols();
  const Scalar h = grid.spacing();
  NodeDerivatives<Scalar> n{in.values, PlaneT<Scalar>(I, J), PlaneT<Scalar>(I, J),
                            PlaneT<Scalar>(I, J)};
  for (int j = 0; j < J; ++j) {
    n.fx.col(j) = clamped_slopes<Scalar>(n.f.col(j), in.ux(0, j), in.ux(I - 1, j), h);
  }
  for (int i = 0; i < I; ++i) {
    n.fy.row(i) =
        clamped_slopes<Scalar>(n.f.row(i).transpose(), in.uy(i, 0), in.uy(i, J - 1), h)
            .transpose();
  }
  for (int i : {0, I - 1}) {
    n.fxy.row(i) = clamped_slopes<Scalar>(n.fx.row(i).transpose(), in.uxy(i, 0),
                                          in.uxy(i, J - 1), h)
                       .transpose();
  }
  for (int j = 0; j < J; ++j) {
    const VectorT<Scalar> ends = n.fxy.col(j);
    n.fxy.col(j) = clamped_slopes<Scalar>(n.fy.col(j), ends(0), ends(I - 1), h);
  }
  return n;
}

/// Transpose of node_derivatives. The returned planes are zero off the
/// constraint sets.
template <typename Scalar>
SplineInput<Scalar> node_derivatives_adjoint(const NodeDerivatives<Scalar>& bar,
                                             const Grid& grid) {
  const int I = grid.rows();
  const int J = grid.cols();
  const Scalar h = grid.spacing();
  SplineInput<Scalar> out = SplineInput<Scalar>::zeros(I, J);
  PlaneT<Scalar> f_bar = bar.f;
  PlaneT<Scalar> fx_bar = bar.fx;
  PlaneT<Scalar> fy_bar = bar.fy;
  PlaneT<Scalar> edge_fxy_bar = PlaneT<Scalar>::Zero(I, J);

  for (int j = 0; j < J; ++j) {
    VectorT<Scalar> fy_col = VectorT<Scalar>::Zero(I);
    Scalar e0 = 0, e1 = 0;
    clamped_slopes_adjoint<Scalar>(bar.fxy.col(j), h, fy_col, e0, e1);
    fy_bar.col(j) += fy_col;
    edge_fxy_bar(0, j) += e0;
    edge_fxy_bar(I - 1, j) += e1;
  }
  for (int i : {0, I - 1}) {
    VectorT<Scalar> fx_row = VectorT<Scalar>::Zero(J);
    Scalar c0 = 0, c1 = 0;
    clamped_slopes_adjoint<Scalar>(edge_fxy_bar.row(i).transpose(), h, fx_row, c0, c1);
    fx_bar.row(i) += fx_row.transpose();
    out.uxy(i, 0) += c0;
    out.uxy(i, J - 1) += c1;
  }
  for (int i = 0; i < I; ++i) {
    VectorT<Scalar> f_row = VectorT<Scalar>::Zero(J);
    Scalar e0 = 0, e1 = 0;
    clamped_slopes_adjoint<Scalar>(fy_bar.row(i).transpose(), h, f_row, e0, e1);
    f_bar.row(i) += f_row.transpose();
    out.uy(i, 0) += e0;
    out.uy(i, J - 1) += e1;
  }
  for (int j = 0; j < J; ++j) {
    VectorT<Scalar> f_col = VectorT<Scalar>::Zero(I);
    Scalar e0 = 0, e1 = 0;
    clamped_slopes_adjoint<Scalar>(fx_bar.col(j), h, f_col, e0, e1);
    f_bar.col(j) += f_col;
    out.ux(0, j) += e0;
    out.ux(I - 1, j) += e1;
  }
  out.values = f_bar;
  return out;
}

/// Power-basis coefficients of every patch from complete node data.
template <typename Scalar>
SplinePatchSet<Scalar> patches_from_nodes(const NodeDerivatives<Scalar>& n, const Grid& grid) {
  const Matrix4T<Scalar> H = detail::hermite_to_monomial<Scalar>(grid.spacing());
  std::vector<Matrix4T<Scalar>> coeffs;
  coeffs.reserve(static_cast<std::size_t>((grid.rows() - 1) * (grid.cols() - 1)));
  for (int i = 0; i + 1 < grid.rows(); ++i) {
    for (int j = 0; j + 1 < grid.cols(); ++j) {
      coeffs.push_back(H * detail::hermite_block(n, i, j) * H.transpose());
    }
  }
  return {grid, std::move(coeffs)};
}

/// Transpose of patches_from_nodes.
template <typename Scalar>
NodeDerivatives<Scalar> patches_from_nodes_adjoint(const std::vector<Matrix4T<Scalar>>& coeff_bar,
                                                   const Grid& grid) {
  const int I = grid.rows();
  const int J = grid.cols();
  const Matrix4T<Scalar> H = detail::hermite_to_monomial<Scalar>(grid.spacing());
  const PlaneT<Scalar> z = PlaneT<Scalar>::Zero(I, J);
  NodeDerivatives<Scalar> n{z, z, z, z};
  std::size_t p = 0;
  for (int i = 0; i + 1 < I; ++i) {
    for (int j = 0; j + 1 < J; ++j, ++p) {
      const Matrix4T<Scalar> fb = H.transpose() * coeff_bar[p] * H;
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          const int ni = i + a;
          const int nj = j + b;
          n.f(ni, nj) += fb(2 * a, 2 * b);
          n.fy(ni, nj) += fb(2 * a, 2 * b + 1);
          n.fx(ni, nj) += fb(2 * a + 1, 2 * b);
          n.fxy(ni, nj) += fb(2 * a + 1, 2 * b + 1);
        }
      }
    }
  }
  return n;
}

/// Bicubic spline of one real plane.
template <typename Scalar>
SplinePatchSet<Scalar> fit_spline(const SplineInput<Scalar>& in, const Grid& grid) {
  return patches_from_nodes(node_derivatives(in, grid), grid);
}

/// Transpose of the linear map fit_spline: input sensitivities from patch
/// coefficient sensitivities.
template <typename Scalar>
SplineInput<Scalar> fit_spline_adjoint(const std::vector<Matrix4T<Scalar>>& coeff_bar,
                                       const Grid& grid) {
  return node_derivatives_adjoint(patches_from_nodes_adjoint(coeff_bar, grid), grid);
}

/// Behavior for points outside the rectangle spanned by the grid.
enum class OutOfDomain { kError, kClamp };

/// Mixed partial derivative d^(ox+oy) h / dx^ox dy^oy of the interpolant.
template <typename Scalar>
Scalar evaluate_derivative(const SplinePatchSet<Scalar>& s, double x, double y, int order_x,
                           int order_y, OutOfDomain policy = OutOfDomain::kError) {
  const Grid& g = s.grid();
  const double tol = 1e-12 * g.spacing();
  if (!g.contains(Point2(x, y), tol)) {
    if (policy == OutOfDomain::kError) {
      throw std::out_of_range("spline evaluation point lies outside the grid");
    }
  }
  x = std::clamp(x, g.x_min(), g.x_max());
  y = std::clamp(y, g.y_min(), g.y_max());
  const double l = g.spacing();
  const int i = std::clamp(static_cast<int>(std::floor((x - g.x_min()) / l)), 0, s.patch_rows() - 1);
  const int j = std::clamp(static_cast<int>(std::floor((y - g.y_min()) / l)), 0, s.patch_cols() - 1);
  const Vector4T<Scalar> gx = detail::basis_derivative<Scalar>(Scalar(x - g.x(i)), order_x);
  const Vector4T<Scalar> gy = detail::basis_derivative<Scalar>(Scalar(y - g.y(j)), order_y);
  return gx.dot(s.patch(i, j) * gy);
}

template <typename Scalar>
Scalar evaluate(const SplinePatchSet<Scalar>& s, double x, double y,
                OutOfDomain policy = OutOfDomain::kError) {
  return evaluate_derivative(s, x, y, 0, 0, policy);
}

template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> evaluate_gradient(const SplinePatchSet<Scalar>& s, double x, double y,
                                              OutOfDomain policy = OutOfDomain::kError) {
  return {evaluate_derivative(s, x, y, 1, 0, policy), evaluate_derivative(s, x, y, 0, 1, policy)};
}

template <typename Scalar>
Scalar evaluate_laplacian(const SplinePatchSet<Scalar>& s, double x, double y,
                          OutOfDomain policy = OutOfDomain::kError) {
  return evaluate_derivative(s, x, y, 2, 0, policy) + evaluate_derivative(s, x, y, 0, 2, policy);
}

/// Splits an output tensor into the Re and Im spline inputs.
inline SplineInput<double> spline_input(const OutputTensor& out, bool imaginary) {
  const int o = imaginary ? 1 : 0;
  return {out[kURe + o], out[kUxRe + o], out[kUyRe + o], out[kUxyRe + o]};
}

/// Continuous interpolant of the estimator output.
inline SplineField interpolate_output(const OutputTensor& out, const Grid& grid) {
  return {fit_spline(spline_input(out, false), grid), fit_spline(spline_input(out, true), grid)};
}

}  // namespace sfr
