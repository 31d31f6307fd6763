#include "sfr/core.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <set>
#include <stdexcept>
#include <string>

namespace sfr {

Grid::Grid(int rows, int cols, double spacing)
    : Grid(rows, cols, spacing,
           Point2(-0.5 * (rows - 1) * spacing, -0.5 * (cols - 1) * spacing)) {}

Grid::Grid(int rows, int cols, double spacing, Point2 origin_offset)
    : rows_(rows), cols_(cols), spacing_(spacing), origin_(std::move(origin_offset)) {
  if (rows < 2 || cols < 2) {
    throw std::invalid_argument("grid needs at least 2 nodes per axis");
  }
  if (!(spacing > 0.0) || !std::isfinite(spacing)) {
    throw std::invalid_argument("grid spacing must be positive and finite");
  }
  if (!origin_.allFinite()) throw std::invalid_argument("grid origin must be finite");
}

bool Grid::contains(const Point2& p, double tol) const {
  return p.x() >= x_min() - tol && p.x() <= x_max() + tol && p.y() >= y_min() - tol &&
         p.y() <= y_max() + tol;
}

double Grid::distance_to(const Point2& p) const {
  const double dx = std::max({x_min() - p.x(), 0.0, p.x() - x_max()});
  const double dy = std::max({y_min() - p.y(), 0.0, p.y() - y_max()});
  return std::hypot(dx, dy);
}

std::vector<Point2> positions(const Grid& grid) {
  std::vector<Point2> out;
  out.reserve(static_cast<std::size_t>(grid.size()));
  for (int i = 0; i < grid.rows(); ++i) {
    for (int j = 0; j < grid.cols(); ++j) out.push_back(grid.position(i, j));
  }
  return out;
}

WaveContext::WaveContext(double frequency_hz, double sound_speed_mps)
    : frequency_(frequency_hz), sound_speed_(sound_speed_mps) {
  if (!(frequency_hz > 0.0) || !(sound_speed_mps > 0.0) || !std::isfinite(frequency_hz) ||
      !std::isfinite(sound_speed_mps)) {
    throw std::invalid_argument("frequency and sound speed must be positive");
  }
  wavenumber_ = 2.0 * M_PI * frequency_ / sound_speed_;
}

ComplexField::ComplexField(Plane re_, Plane im_) : re(std::move(re_)), im(std::move(im_)) {
  if (re.rows() != im.rows() || re.cols() != im.cols()) {
    throw std::invalid_argument("real and imaginary planes differ in shape");
  }
}

ComplexField ComplexField::zeros(const Grid& grid) {
  return {Plane::Zero(grid.rows(), grid.cols()), Plane::Zero(grid.rows(), grid.cols())};
}

ComplexField ComplexField::rotated(double phase) const {
  const double c = std::cos(phase);
  const double s = std::sin(phase);
  return {c * re - s * im, s * re + c * im};
}

ObservationSet::ObservationSet(const Grid& grid, std::vector<GridIndex> indices,
                               std::vector<std::complex<double>> values)
    : indices_(std::move(indices)), values_(std::move(values)),
      mask_(Plane::Zero(grid.rows(), grid.cols())) {
  if (indices_.empty() || static_cast<int>(indices_.size()) > grid.size()) {
    throw std::invalid_argument("observation count must be in [1, N]");
  }
  if (indices_.size() != values_.size()) {
    throw std::invalid_argument("observation indices and values differ in length");
  }
  for (const auto& idx : indices_) {
    if (idx.i < 0 || idx.i >= grid.rows() || idx.j < 0 || idx.j >= grid.cols()) {
      throw std::invalid_argument("observation index outside the grid");
    }
    if (mask_(idx.i, idx.j) != 0.0) {
      throw std::invalid_argument("duplicate observation index");
    }
    mask_(idx.i, idx.j) = 1.0;
  }
}

ObservationSet ObservationSet::from_field(const Grid& grid, const ComplexField& field,
                                          std::vector<GridIndex> indices) {
  std::vector<std::complex<double>> values;
  values.reserve(indices.size());
  for (const auto& idx : indices) values.push_back(field.at(idx.i, idx.j));
  return {grid, std::move(indices), std::move(values)};
}

std::vector<Point2> ObservationSet::points(const Grid& grid) const {
  std::vector<Point2> out;
  out.reserve(indices_.size());
  for (const auto& idx : indices_) out.push_back(grid.position(idx.i, idx.j));
  return out;
}

ObservationSet ObservationSet::scaled(double s) const {
  ObservationSet out = *this;
  for (auto& v : out.values_) v *= s;
  return out;
}

OutputTensor::OutputTensor(int rows, int cols) {
  for (auto& c : channels) c = Plane::Zero(rows, cols);
}

void OutputTensor::mask_derivatives() {
  const int I = rows();
  const int J = cols();
  for (int c : {kUxRe, kUxIm}) {
    (*this)[c].middleRows(1, I - 2).setZero();
  }
  for (int c : {kUyRe, kUyIm}) {
    (*this)[c].middleCols(1, J - 2).setZero();
  }
  for (int c : {kUxyRe, kUxyIm}) {
    Plane& p = (*this)[c];
    const double a = p(0, 0), b = p(I - 1, 0), d = p(0, J - 1), e = p(I - 1, J - 1);
    p.setZero();
    p(0, 0) = a;
    p(I - 1, 0) = b;
    p(0, J - 1) = d;
    p(I - 1, J - 1) = e;
  }
}

void OutputTensor::zero_derivatives() {
  for (int c = kUxRe; c < kOutputChannels; ++c) (*this)[c].setZero();
}

OutputTensor OutputTensor::scaled(double s) const {
  OutputTensor out = *this;
  for (auto& c : out.channels) c *= s;
  return out;
}

double OutputTensor::dot(const OutputTensor& other) const {
  double acc = 0.0;
  for (int c = 0; c < kOutputChannels; ++c) acc += (*this)[c].cwiseProduct(other[c]).sum();
  return acc;
}

OutputTensor output_from_pressure(const ComplexField& field) {
  OutputTensor out(field.rows(), field.cols());
  out[kURe] = field.re;
  out[kUIm] = field.im;
  return out;
}

}  // namespace sfr
