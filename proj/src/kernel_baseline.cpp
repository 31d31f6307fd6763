#include "sfr/kernel_baseline.hpp"

#include "sfr/bessel.hpp"

#include <cmath>
#include <stdexcept>

namespace sfr {

Eigen::MatrixXd kernel_gram(const std::vector<Point2>& points, double wavenumber) {
  const auto m = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd K(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    K(a, a) = 1.0;
    for (Eigen::Index b = a + 1; b < m; ++b) {
      const double d = (points[static_cast<std::size_t>(a)] - points[static_cast<std::size_t>(b)]).norm();
      K(a, b) = K(b, a) = bessel_j0(wavenumber * d);
    }
  }
  return K;
}

KernelEstimator::KernelEstimator(std::vector<Point2> points,
                                 std::vector<std::complex<double>> weights, double wavenumber,
                                 double regularization)
    : points_(std::move(points)), weights_(std::move(weights)), wavenumber_(wavenumber),
      regularization_(regularization) {
  if (points_.size() != weights_.size()) {
    throw std::invalid_argument("kernel points and weights differ in length");
  }
}

KernelEstimator KernelEstimator::fit(const ObservationSet& obs, const Grid& grid,
                                     const WaveContext& ctx, double regularization) {
  return fit(obs.points(grid), obs.values(), ctx.wavenumber(), regularization);
}

KernelEstimator KernelEstimator::fit(const std::vector<Point2>& points,
                                     const std::vector<std::complex<double>>& values,
                                     double wavenumber, double regularization) {
  if (points.empty()) throw std::invalid_argument("kernel fit needs at least one observation");
  if (points.size() != values.size()) {
    throw std::invalid_argument("observation points and values differ in length");
  }
  if (!(regularization > 0.0)) throw std::invalid_argument("regularization must be positive");

  const auto m = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd A = kernel_gram(points, wavenumber);
  A.diagonal().array() += regularization;
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) throw std::runtime_error("kernel system is not positive definite");

  Eigen::MatrixXd rhs(m, 2);
  for (Eigen::Index a = 0; a < m; ++a) {
    rhs(a, 0) = values[static_cast<std::size_t>(a)].real();
    rhs(a, 1) = values[static_cast<std::size_t>(a)].imag();
  }
  const Eigen::MatrixXd w = llt.solve(rhs);
  std::vector<std::complex<double>> weights(static_cast<std::size_t>(m));
  for (Eigen::Index a = 0; a < m; ++a) weights[static_cast<std::size_t>(a)] = {w(a, 0), w(a, 1)};
  return {points, std::move(weights), wavenumber, regularization};
}

std::complex<double> KernelEstimator::predict(const Point2& r) const {
  std::complex<double> acc = 0.0;
  for (std::size_t m = 0; m < points_.size(); ++m) {
    acc += weights_[m] * bessel_j0(wavenumber_ * (r - points_[m]).norm());
  }
  return acc;
}

std::vector<std::complex<double>> KernelEstimator::predict(const std::vector<Point2>& points) const {
  std::vector<std::complex<double>> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(predict(p));
  return out;
}

ComplexField KernelEstimator::predict(const Grid& grid) const {
  ComplexField f = ComplexField::zeros(grid);
  for (int i = 0; i < grid.rows(); ++i) {
    for (int j = 0; j < grid.cols(); ++j) f.set(i, j, predict(grid.position(i, j)));
  }
  return f;
}

// With F(rho) = J0(k rho):
//   dF/dx    = F'(rho) dx / rho,                    F'  = -k J1(k rho)
//   d2F/dxdy = dx dy / rho^2 (F'' - F' / rho),      F'' = -k^2 (J0 - J1 / (k rho))
// Both vanish at rho = 0.
std::complex<double> KernelEstimator::predict_dx(const Point2& r) const {
  std::complex<double> acc = 0.0;
  for (std::size_t m = 0; m < points_.size(); ++m) {
    const Point2 d = r - points_[m];
    const double rho = d.norm();
    if (rho < 1e-14) continue;
    acc += weights_[m] * (-wavenumber_ * bessel_j1(wavenumber_ * rho) * d.x() / rho);
  }
  return acc;
}

std::complex<double> KernelEstimator::predict_dy(const Point2& r) const {
  std::complex<double> acc = 0.0;
  for (std::size_t m = 0; m < points_.size(); ++m) {
    const Point2 d = r - points_[m];
    const double rho = d.norm();
    if (rho < 1e-14) continue;
    acc += weights_[m] * (-wavenumber_ * bessel_j1(wavenumber_ * rho) * d.y() / rho);
  }
  return acc;
}

std::complex<double> KernelEstimator::predict_dxy(const Point2& r) const {
  const double k = wavenumber_;
  std::complex<double> acc = 0.0;
  for (std::size_t m = 0; m < points_.size(); ++m) {
    const Point2 d = r - points_[m];
    const double rho = d.norm();
    if (rho < 1e-14) continue;
    const double kr = k * rho;
    const double j0 = bessel_j0(kr);
    const double j1 = bessel_j1(kr);
    const double f1 = -k * j1;
    const double f2 = -k * k * (j0 - j1 / kr);
    acc += weights_[m] * (d.x() * d.y() / (rho * rho) * (f2 - f1 / rho));
  }
  return acc;
}

OutputTensor KernelEstimator::predict_output(const Grid& grid) const {
  OutputTensor out = output_from_pressure(predict(grid));
  const int I = grid.rows();
  const int J = grid.cols();
  auto put = [&](int channel, int i, int j, std::complex<double> v) {
    out[channel](i, j) = v.real();
    out[channel + 1](i, j) = v.imag();
  };
  for (int j = 0; j < J; ++j) {
    for (int i : {0, I - 1}) put(kUxRe, i, j, predict_dx(grid.position(i, j)));
  }
  for (int i = 0; i < I; ++i) {
    for (int j : {0, J - 1}) put(kUyRe, i, j, predict_dy(grid.position(i, j)));
  }
  for (int i : {0, I - 1}) {
    for (int j : {0, J - 1}) put(kUxyRe, i, j, predict_dxy(grid.position(i, j)));
  }
  return out;
}

}  // namespace sfr
