#include "sfr/simulator.hpp"

#include "sfr/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace sfr {

namespace {
constexpr std::complex<double> kJ(0.0, 1.0);
}

std::complex<double> PlaneWaveMix::value(const Point2& r, double k) const {
  std::complex<double> acc = 0.0;
  for (std::size_t w = 0; w < directions.size(); ++w) {
    const double phase = k * (r.x() * std::cos(directions[w]) + r.y() * std::sin(directions[w]));
    acc += amplitudes[w] * std::polar(1.0, phase);
  }
  return acc;
}

std::complex<double> PlaneWaveMix::dx(const Point2& r, double k) const {
  std::complex<double> acc = 0.0;
  for (std::size_t w = 0; w < directions.size(); ++w) {
    const double cx = std::cos(directions[w]), cy = std::sin(directions[w]);
    acc += amplitudes[w] * kJ * k * cx * std::polar(1.0, k * (r.x() * cx + r.y() * cy));
  }
  return acc;
}

std::complex<double> PlaneWaveMix::dy(const Point2& r, double k) const {
  std::complex<double> acc = 0.0;
  for (std::size_t w = 0; w < directions.size(); ++w) {
    const double cx = std::cos(directions[w]), cy = std::sin(directions[w]);
    acc += amplitudes[w] * kJ * k * cy * std::polar(1.0, k * (r.x() * cx + r.y() * cy));
  }
  return acc;
}

std::complex<double> PlaneWaveMix::dxy(const Point2& r, double k) const {
  std::complex<double> acc = 0.0;
  for (std::size_t w = 0; w < directions.size(); ++w) {
    const double cx = std::cos(directions[w]), cy = std::sin(directions[w]);
    acc += amplitudes[w] * (-k * k * cx * cy) * std::polar(1.0, k * (r.x() * cx + r.y() * cy));
  }
  return acc;
}

ComplexField plane_wave_field(const Grid& grid, const WaveContext& ctx, const PlaneWaveMix& mix) {
  if (mix.directions.empty() || mix.directions.size() != mix.amplitudes.size()) {
    throw std::invalid_argument("plane-wave mix needs matching, nonempty directions and amplitudes");
  }
  ComplexField f = ComplexField::zeros(grid);
  for (int i = 0; i < grid.rows(); ++i) {
    for (int j = 0; j < grid.cols(); ++j) {
      f.set(i, j, mix.value(grid.position(i, j), ctx.wavenumber()));
    }
  }
  return f;
}

OutputTensor plane_wave_output(const Grid& grid, const WaveContext& ctx, const PlaneWaveMix& mix) {
  OutputTensor out = output_from_pressure(plane_wave_field(grid, ctx, mix));
  const double k = ctx.wavenumber();
  for (int i = 0; i < grid.rows(); ++i) {
    for (int j = 0; j < grid.cols(); ++j) {
      const Point2 r = grid.position(i, j);
      const auto dx = mix.dx(r, k), dy = mix.dy(r, k), dxy = mix.dxy(r, k);
      out[kUxRe](i, j) = dx.real();
      out[kUxIm](i, j) = dx.imag();
      out[kUyRe](i, j) = dy.real();
      out[kUyIm](i, j) = dy.imag();
      out[kUxyRe](i, j) = dxy.real();
      out[kUxyIm](i, j) = dxy.imag();
    }
  }
  out.mask_derivatives();
  return out;
}

std::complex<double> point_source_value(const Point2& r, const Point2& source, double k) {
  return 0.25 * kJ * hankel1_0(k * (r - source).norm());
}

ComplexField point_source_field(const Grid& grid, const WaveContext& ctx, const Point2& source) {
  if (grid.distance_to(source) <= 0.0) {
    throw std::invalid_argument("point source must lie outside the region");
  }
  ComplexField f = ComplexField::zeros(grid);
  for (int i = 0; i < grid.rows(); ++i) {
    for (int j = 0; j < grid.cols(); ++j) {
      f.set(i, j, point_source_value(grid.position(i, j), source, ctx.wavenumber()));
    }
  }
  return f;
}

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t index) {
  return mix_seed(seed ^ mix_seed(index));
}

PlaneWaveMix random_plane_wave_mix(int n_waves, std::mt19937_64& rng) {
  if (n_waves < 1) throw std::invalid_argument("need at least one plane wave");
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  PlaneWaveMix mix;
  for (int w = 0; w < n_waves; ++w) {
    mix.directions.push_back(angle(rng));
    const double re = normal(rng);
    const double im = normal(rng);
    mix.amplitudes.emplace_back(re, im);
  }
  return mix;
}

Sample generate_sample(const Grid& grid, const WaveContext& ctx, const GeneratorConfig& cfg,
                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Sample s;
  s.meta.kind = cfg.kind;
  s.meta.seed = seed;
  if (cfg.kind == SourceKind::kPlaneWaveMix) {
    const PlaneWaveMix mix = random_plane_wave_mix(cfg.n_waves, rng);
    s.meta.n_waves = cfg.n_waves;
    s.field = plane_wave_field(grid, ctx, mix);
    return s;
  }
  if (!(cfg.annulus_outer > cfg.annulus_inner) || cfg.annulus_inner <= 0.0) {
    throw std::invalid_argument("source annulus radii must satisfy 0 < inner < outer");
  }
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // Uniform over the annulus area; rejection keeps the clearance invariant.
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const double r2 = cfg.annulus_inner * cfg.annulus_inner +
                      unit(rng) * (cfg.annulus_outer * cfg.annulus_outer -
                                   cfg.annulus_inner * cfg.annulus_inner);
    const double theta = angle(rng);
    const Point2 src = std::sqrt(r2) * Point2(std::cos(theta), std::sin(theta));
    if (grid.distance_to(src) >= kMinSourceClearance) {
      s.meta.source = src;
      s.field = point_source_field(grid, ctx, src);
      return s;
    }
  }
  throw std::invalid_argument("source annulus leaves no room outside the region");
}

Dataset generate_dataset(const Grid& grid, const WaveContext& ctx, int n_samples,
                         const GeneratorConfig& cfg, std::uint64_t seed) {
  if (n_samples < 2 || n_samples % 2 != 0) {
    throw std::invalid_argument("sample count must be even and positive (half train, half test)");
  }
  Dataset ds{grid, ctx, seed, cfg.kind, n_samples / 2, {}};
  ds.samples.reserve(static_cast<std::size_t>(n_samples));
  for (int i = 0; i < n_samples; ++i) {
    ds.samples.push_back(generate_sample(grid, ctx, cfg, sample_seed(seed, static_cast<std::uint64_t>(i))));
  }
  return ds;
}

std::vector<GridIndex> sample_indices(const Grid& grid, int m, std::mt19937_64& rng) {
  const int n = grid.size();
  if (m < 1 || m > n) throw std::invalid_argument("observation count must be in [1, N]");
  // Partial Fisher-Yates with an explicit uniform draw (portable across
  // standard libraries, unlike std::shuffle).
  std::vector<int> flat(static_cast<std::size_t>(n));
  std::iota(flat.begin(), flat.end(), 0);
  for (int a = 0; a < m; ++a) {
    const auto span = static_cast<std::uint64_t>(n - a);
    const auto b = a + static_cast<int>(rng() % span);
    std::swap(flat[static_cast<std::size_t>(a)], flat[static_cast<std::size_t>(b)]);
  }
  std::vector<GridIndex> out;
  out.reserve(static_cast<std::size_t>(m));
  for (int a = 0; a < m; ++a) {
    const int f = flat[static_cast<std::size_t>(a)];
    out.push_back({f / grid.cols(), f % grid.cols()});
  }
  return out;
}

ObservationSet sample_observations(const Grid& grid, const ComplexField& field, int m,
                                   std::mt19937_64& rng) {
  return ObservationSet::from_field(grid, field, sample_indices(grid, m, rng));
}

ObservationSet sample_observations(const Grid& grid, const ComplexField& field, int m,
                                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_observations(grid, field, m, rng);
}

double standardization_scale(const ComplexField& field) {
  const double s = std::max(field.re.cwiseAbs().maxCoeff(), field.im.cwiseAbs().maxCoeff());
  return s > 0.0 ? s : 1.0;
}

double standardization_scale(const ObservationSet& obs) {
  double s = 0.0;
  for (const auto& v : obs.values()) s = std::max({s, std::abs(v.real()), std::abs(v.imag())});
  return s > 0.0 ? s : 1.0;
}

Standardized standardize(const ComplexField& field) {
  const double s = standardization_scale(field);
  return {field.scaled(1.0 / s), s};
}

ComplexField randomize_phase(const ComplexField& field, std::mt19937_64& rng, double* phase) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  const double phi = angle(rng);
  if (phase != nullptr) *phase = phi;
  return field.rotated(phi);
}

}  // namespace sfr
