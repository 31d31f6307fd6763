#pragma once

// Helmholtz-exact field generators and the observation/standardization
// utilities used to build training and test data.

#include "sfr/core.hpp"
#include "sfr/dataset.hpp"

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace sfr {

/// Plane-wave superposition u(r) = sum_w a_w exp(j k r . d_w), d_w = (cos t, sin t).
struct PlaneWaveMix {
  std::vector<double> directions;  // radians
  std::vector<std::complex<double>> amplitudes;

  std::complex<double> value(const Point2& r, double k) const;
  std::complex<double> dx(const Point2& r, double k) const;
  std::complex<double> dy(const Point2& r, double k) const;
  std::complex<double> dxy(const Point2& r, double k) const;
};

ComplexField plane_wave_field(const Grid& grid, const WaveContext& ctx, const PlaneWaveMix& mix);
/// Same field in the output layout, with exact boundary derivatives.
OutputTensor plane_wave_output(const Grid& grid, const WaveContext& ctx, const PlaneWaveMix& mix);

/// Free-field 2D point source, u(r) = (j / 4) H0^(1)(k |r - r_s|).
std::complex<double> point_source_value(const Point2& r, const Point2& source, double k);
/// Requires the source outside the grid rectangle.
ComplexField point_source_field(const Grid& grid, const WaveContext& ctx, const Point2& source);

inline constexpr double kMinSourceClearance = 0.1;

struct GeneratorConfig {
  SourceKind kind = SourceKind::kPointSource;
  double annulus_inner = 2.2;  // meters from the origin
  double annulus_outer = 4.0;
  int n_waves = 5;
};

/// splitmix64 finalizer; per-sample seeds are derived as mix(seed ^ mix(i)).
std::uint64_t mix_seed(std::uint64_t x);
std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t index);

/// One random sample of the configured family.
Sample generate_sample(const Grid& grid, const WaveContext& ctx, const GeneratorConfig& cfg,
                       std::uint64_t sample_seed);
/// Random plane-wave mix: uniform directions, complex Gaussian amplitudes.
PlaneWaveMix random_plane_wave_mix(int n_waves, std::mt19937_64& rng);

/// n_samples samples, the first half for training and the second for testing.
Dataset generate_dataset(const Grid& grid, const WaveContext& ctx, int n_samples,
                         const GeneratorConfig& cfg, std::uint64_t seed);

/// M distinct nodes drawn uniformly without replacement.
std::vector<GridIndex> sample_indices(const Grid& grid, int m, std::mt19937_64& rng);
ObservationSet sample_observations(const Grid& grid, const ComplexField& field, int m,
                                   std::mt19937_64& rng);
ObservationSet sample_observations(const Grid& grid, const ComplexField& field, int m,
                                   std::uint64_t seed);

/// Scale factor max(|re|, |im|) over all entries; 1 for an all-zero input.
double standardization_scale(const ComplexField& field);
double standardization_scale(const ObservationSet& obs);

struct Standardized {
  ComplexField field;
  double scale = 1.0;
};
/// Divides both planes by standardization_scale, so every entry is in [-1, 1].
Standardized standardize(const ComplexField& field);

/// Multiplies the field by e^{j phi}, phi ~ U[0, 2 pi).
ComplexField randomize_phase(const ComplexField& field, std::mt19937_64& rng, double* phase = nullptr);

/// Centered five-point estimate of (Delta + k^2) u / (k^2 |u|) at r, the
/// relative Helmholtz residual used to check generated fields.
template <typename F>
double fd_helmholtz_relative_residual(F&& u, const Point2& r, double k, double h) {
  const std::complex<double> c = u(r);
  const std::complex<double> lap =
      (u(Point2(r.x() + h, r.y())) + u(Point2(r.x() - h, r.y())) + u(Point2(r.x(), r.y() + h)) +
       u(Point2(r.x(), r.y() - h)) - 4.0 * c) /
      (h * h);
  return std::abs(lap + k * k * c) / (k * k * std::abs(c));
}

}  // namespace sfr
