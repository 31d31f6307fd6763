#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

namespace sfr {

/// Real plane indexed (i, j): row i runs along x, column j along y.
template <typename Scalar>
using PlaneT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using Plane = PlaneT<double>;

using Point2 = Eigen::Vector2d;

/// Index pair (i, j) into a grid.
struct GridIndex {
  int i = 0;
  int j = 0;
  friend bool operator==(const GridIndex&, const GridIndex&) = default;
};

/// Regular I x J lattice of evaluation points with spacing l, centered on the
/// origin unless an explicit offset is given. Corner nodes lie on the corners
/// of the rectangular region.
class Grid {
 public:
  Grid(int rows, int cols, double spacing);
  Grid(int rows, int cols, double spacing, Point2 origin_offset);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int size() const { return rows_ * cols_; }
  double spacing() const { return spacing_; }
  const Point2& origin() const { return origin_; }

  double x(int i) const { return origin_.x() + i * spacing_; }
  double y(int j) const { return origin_.y() + j * spacing_; }
  Point2 position(int i, int j) const { return {x(i), y(j)}; }

  double width() const { return (rows_ - 1) * spacing_; }
  double height() const { return (cols_ - 1) * spacing_; }
  double area() const { return width() * height(); }

  double x_min() const { return x(0); }
  double x_max() const { return x(rows_ - 1); }
  double y_min() const { return y(0); }
  double y_max() const { return y(cols_ - 1); }

  bool contains(const Point2& p, double tol = 0.0) const;

  /// Euclidean distance from p to the closed rectangle (0 inside).
  double distance_to(const Point2& p) const;

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.spacing_ == b.spacing_ &&
           a.origin_ == b.origin_;
  }

 private:
  int rows_;
  int cols_;
  double spacing_;
  Point2 origin_;
};

/// All node positions in row-major (i, j) order.
std::vector<Point2> positions(const Grid& grid);

/// Single-frequency acoustic context; the wavenumber is derived, k = 2 pi f / c.
class WaveContext {
 public:
  WaveContext(double frequency_hz, double sound_speed_mps);

  double frequency() const { return frequency_; }
  double sound_speed() const { return sound_speed_; }
  double wavenumber() const { return wavenumber_; }
  double wavelength() const { return sound_speed_ / frequency_; }

 private:
  double frequency_;
  double sound_speed_;
  double wavenumber_;
};

/// Complex pressure on the grid, stored as separate real/imaginary planes.
struct ComplexField {
  Plane re;
  Plane im;

  ComplexField() = default;
  ComplexField(Plane re_, Plane im_);
  static ComplexField zeros(const Grid& grid);

  int rows() const { return static_cast<int>(re.rows()); }
  int cols() const { return static_cast<int>(re.cols()); }
  bool matches(const Grid& grid) const {
    return rows() == grid.rows() && cols() == grid.cols();
  }
  bool all_finite() const { return re.allFinite() && im.allFinite(); }

  std::complex<double> at(int i, int j) const { return {re(i, j), im(i, j)}; }
  void set(int i, int j, std::complex<double> v) {
    re(i, j) = v.real();
    im(i, j) = v.imag();
  }

  ComplexField scaled(double s) const { return {re * s, im * s}; }
  /// Multiplies every entry by the unit phasor e^{j phase}.
  ComplexField rotated(double phase) const;

  double energy() const { return re.squaredNorm() + im.squaredNorm(); }
};

/// M distinct observed nodes with their complex values and the 0/1 mask.
class ObservationSet {
 public:
  ObservationSet(const Grid& grid, std::vector<GridIndex> indices,
                 std::vector<std::complex<double>> values);

  /// Copies the field values at `indices`.
  static ObservationSet from_field(const Grid& grid, const ComplexField& field,
                                   std::vector<GridIndex> indices);

  int size() const { return static_cast<int>(indices_.size()); }
  const std::vector<GridIndex>& indices() const { return indices_; }
  const std::vector<std::complex<double>>& values() const { return values_; }
  const Plane& mask() const { return mask_; }

  std::vector<Point2> points(const Grid& grid) const;
  ObservationSet scaled(double s) const;

 private:
  std::vector<GridIndex> indices_;
  std::vector<std::complex<double>> values_;
  Plane mask_;
};

/// Channel order of the estimator output.
enum Channel : int {
  kURe = 0,
  kUIm = 1,
  kUxRe = 2,
  kUxIm = 3,
  kUyRe = 4,
  kUyIm = 5,
  kUxyRe = 6,
  kUxyIm = 7,
};
inline constexpr int kOutputChannels = 8;

/// Eight I x J planes: pressure and boundary derivatives, Re/Im interleaved.
/// Derivative planes only carry meaning on their constraint sets: u_x on the
/// rows i = 0 and i = I-1, u_y on the columns j = 0 and j = J-1, u_xy at the
/// four corners.
struct OutputTensor {
  std::array<Plane, kOutputChannels> channels;

  OutputTensor() = default;
  OutputTensor(int rows, int cols);
  static OutputTensor zeros(const Grid& grid) { return {grid.rows(), grid.cols()}; }

  int rows() const { return static_cast<int>(channels[0].rows()); }
  int cols() const { return static_cast<int>(channels[0].cols()); }

  Plane& operator[](int c) { return channels[static_cast<std::size_t>(c)]; }
  const Plane& operator[](int c) const { return channels[static_cast<std::size_t>(c)]; }

  ComplexField pressure() const { return {channels[kURe], channels[kUIm]}; }

  /// Zeroes derivative entries outside their constraint sets.
  void mask_derivatives();
  /// Zeroes every derivative plane (the convention for pressure-only estimates).
  void zero_derivatives();

  OutputTensor scaled(double s) const;
  double dot(const OutputTensor& other) const;
};

/// Pressure-only output tensor (derivative planes zero).
OutputTensor output_from_pressure(const ComplexField& field);

}  // namespace sfr
