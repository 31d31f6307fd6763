#pragma once

#include "sfr/core.hpp"

#include <complex>
#include <vector>

namespace sfr {

inline constexpr double kDefaultKernelRegularization = 1e-3;

/// Kernel ridge regression with the kernel J0(k |r - r'|). Every estimate is a
/// superposition of J0 functions and so solves the Helmholtz equation exactly.
class KernelEstimator {
 public:
  KernelEstimator(std::vector<Point2> points, std::vector<std::complex<double>> weights,
                  double wavenumber, double regularization);

  /// Solves (K + reg I) w = s by Cholesky.
  static KernelEstimator fit(const ObservationSet& obs, const Grid& grid, const WaveContext& ctx,
                             double regularization = kDefaultKernelRegularization);
  static KernelEstimator fit(const std::vector<Point2>& points,
                             const std::vector<std::complex<double>>& values, double wavenumber,
                             double regularization = kDefaultKernelRegularization);

  std::complex<double> predict(const Point2& r) const;
  std::vector<std::complex<double>> predict(const std::vector<Point2>& points) const;
  ComplexField predict(const Grid& grid) const;

  /// Analytic first derivatives (d/dx, d/dy) and the mixed derivative d2/dxdy.
  std::complex<double> predict_dx(const Point2& r) const;
  std::complex<double> predict_dy(const Point2& r) const;
  std::complex<double> predict_dxy(const Point2& r) const;

  /// Estimate on the grid with exact boundary derivatives in the output layout.
  OutputTensor predict_output(const Grid& grid) const;

  const std::vector<Point2>& points() const { return points_; }
  const std::vector<std::complex<double>>& weights() const { return weights_; }
  double wavenumber() const { return wavenumber_; }
  double regularization() const { return regularization_; }

 private:
  std::vector<Point2> points_;
  std::vector<std::complex<double>> weights_;
  double wavenumber_;
  double regularization_;
};

/// Gram matrix K[m][n] = J0(k |r_m - r_n|).
Eigen::MatrixXd kernel_gram(const std::vector<Point2>& points, double wavenumber);

}  // namespace sfr
