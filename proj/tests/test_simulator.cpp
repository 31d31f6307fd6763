#include "doctest.h"
#include "support.hpp"

#include "sfr/bessel.hpp"
#include "sfr/simulator.hpp"

#include <cmath>
#include <random>
#include <set>

using namespace sfr;
using sfr::testing::rel_err;

namespace {
const WaveContext kCtx(300.0, 340.0);
}

TEST_CASE("single plane wave at the origin is 1") {
  const Grid g(3, 3, 0.5);  // centre node at the origin
  const auto f = plane_wave_field(g, kCtx, {{0.0}, {{1.0, 0.0}}});
  CHECK(f.at(1, 1) == std::complex<double>(1.0, 0.0));
}

TEST_CASE("opposite plane waves form a real standing wave") {
  const Grid g(9, 7, 0.13);
  const auto f = plane_wave_field(g, kCtx, {{0.0, M_PI}, {{1.0, 0.0}, {1.0, 0.0}}});
  const double k = kCtx.wavenumber();
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < g.cols(); ++j) {
      CHECK(std::abs(f.im(i, j)) <= 1e-14);
      CHECK(f.re(i, j) == doctest::Approx(2.0 * std::cos(k * g.x(i))).epsilon(1e-13));
    }
}

TEST_CASE("plane-wave derivatives match finite differences") {
  std::mt19937_64 rng(41);
  const auto mix = random_plane_wave_mix(4, rng);
  const double k = kCtx.wavenumber(), h = 1e-5;
  const Point2 r(0.3, -0.8), ex(h, 0), ey(0, h);
  CHECK(std::abs((mix.value(r + ex, k) - mix.value(r - ex, k)) / (2 * h) - mix.dx(r, k)) <= 1e-6);
}

TEST_CASE("plane-wave mixes satisfy the Helmholtz equation") {
  std::mt19937_64 rng(42);
  const double k = kCtx.wavenumber();
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int t = 0; t < 10; ++t) {
    const auto mix = random_plane_wave_mix(5, rng);
    const Point2 r(u(rng), u(rng));
    CHECK(fd_helmholtz_relative_residual([&](const Point2& p) { return mix.value(p, k); }, r, k,
                                         1e-3) <= 1e-3);
  }
}

TEST_CASE("point source: radial symmetry, Hankel value, Helmholtz residual") {
  const Point2 src(2.5, -0.7);
  const double k = 1.0;
  const auto a = point_source_value(src + Point2(0.6, 0.8), src, k);
  const auto b = point_source_value(src + Point2(-1.0, 0.0), src, k);
  CHECK(std::abs(std::abs(a) - std::abs(b)) <= 1e-12);
  const std::complex<double> want = std::complex<double>(0.0, 0.25) * hankel1_0(1.0);
  CHECK(std::abs(a - want) <= 1e-14);
  CHECK(want.real() == doctest::Approx(-0.25 * 0.088256964215677).epsilon(1e-12));
  CHECK(want.imag() == doctest::Approx(0.25 * 0.765197686557967).epsilon(1e-12));

  const Grid g(16, 16, 0.1);
  const double kk = kCtx.wavenumber();
  for (const Point2 r : {Point2(0, 0), Point2(0.7, -0.7), Point2(-0.75, 0.2)}) {
    CHECK(fd_helmholtz_relative_residual(
              [&](const Point2& p) { return point_source_value(p, Point2(3.0, 1.0), kk); }, r, kk,
              1e-3) <= 1e-3);
  }
  CHECK_THROWS_AS(point_source_field(g, kCtx, Point2(0.1, 0.1)), std::invalid_argument);
}

TEST_CASE("dataset generation: split, clearance, determinism") {
  const Grid g(16, 16, 0.2);
  const auto ds = generate_dataset(g, kCtx, 32, {}, 7);
  CHECK(ds.samples.size() == 32);
  CHECK(ds.train().size() == 16);
  CHECK(ds.test().size() == 16);
  for (const auto& s : ds.samples) {
    CHECK(g.distance_to(s.meta.source) >= kMinSourceClearance);
    CHECK(s.meta.source.norm() >= 2.2);
    CHECK(s.meta.source.norm() <= 4.0);
    CHECK(s.field.all_finite());
  }
  const auto again = generate_dataset(g, kCtx, 32, {}, 7);
  for (std::size_t n = 0; n < 32; ++n) {
    CHECK(again.samples[n].field.re == ds.samples[n].field.re);
    CHECK(again.samples[n].field.im == ds.samples[n].field.im);
  }
  const auto other = generate_dataset(g, kCtx, 32, {}, 8);
  CHECK(other.samples[0].field.re != ds.samples[0].field.re);
  CHECK_THROWS_AS(generate_dataset(g, kCtx, 3, {}, 7), std::invalid_argument);
}

TEST_CASE("generated fields pass the Helmholtz check inside the region") {
  const Grid g(16, 16, 0.2);
  const double k = kCtx.wavenumber();
  GeneratorConfig mixes;
  mixes.kind = SourceKind::kPlaneWaveMix;
  for (const auto& cfg : {GeneratorConfig{}, mixes}) {
    const auto ds = generate_dataset(g, kCtx, 8, cfg, 3);
    for (const auto& s : ds.samples) {
      std::function<std::complex<double>(const Point2&)> u;
      if (s.meta.kind == SourceKind::kPointSource) {
        u = [&](const Point2& p) { return point_source_value(p, s.meta.source, k); };
        CHECK(std::abs(u(g.position(3, 5)) - s.field.at(3, 5)) <= 1e-14);
        CHECK(fd_helmholtz_relative_residual(u, g.position(7, 9), k, 1e-3) <= 1e-3);
      } else {
        CHECK(s.meta.n_waves == 5);
      }
    }
  }
}

TEST_CASE("observation sampling") {
  const Grid g(6, 5, 0.1);
  std::mt19937_64 rng(43);
  ComplexField f(testing::random_plane(6, 5, rng), testing::random_plane(6, 5, rng));
  const auto all = sample_observations(g, f, g.size(), std::uint64_t{1});
  CHECK(all.mask().sum() == g.size());
  for (std::size_t n = 0; n < all.indices().size(); ++n) {
    const auto [i, j] = all.indices()[n];
    CHECK(all.values()[n] == f.at(i, j));
  }
  const auto a = sample_observations(g, f, 10, std::uint64_t{9});
  const auto b = sample_observations(g, f, 10, std::uint64_t{9});
  CHECK(a.indices() == b.indices());
  for (int m : {5, 10, 15, 20}) CHECK(sample_observations(g, f, m, std::uint64_t{2}).size() == m);
  CHECK_THROWS_AS(sample_observations(g, f, 0, std::uint64_t{2}), std::invalid_argument);
  CHECK_THROWS_AS(sample_observations(g, f, 31, std::uint64_t{2}), std::invalid_argument);
}

TEST_CASE("standardization and phase randomization") {
  ComplexField f(Plane::Constant(2, 2, 1.0), Plane::Constant(2, 2, -0.5));
  f.re(1, 0) = -4.0;
  const auto s = standardize(f);
  CHECK(s.scale == 4.0);
  CHECK(s.field.re.cwiseAbs().maxCoeff() <= 1.0);
  CHECK(s.field.im.cwiseAbs().maxCoeff() <= 1.0);
  const auto back = s.field.scaled(s.scale);
  CHECK((back.re - f.re).cwiseAbs().maxCoeff() <= 1e-15 * 4.0);
  CHECK(standardization_scale(ComplexField(Plane::Zero(2, 2), Plane::Zero(2, 2))) == 1.0);

  std::mt19937_64 rng(44);
  double phase = -1.0;
  const auto r = randomize_phase(f, rng, &phase);
  CHECK(phase >= 0.0);
  CHECK(phase < 2 * M_PI);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(std::abs(std::abs(r.at(i, j)) - std::abs(f.at(i, j))) <= 1e-12);
  const auto z = f.rotated(0.0);
  CHECK(z.re == f.re);
}

TEST_CASE("seed derivation is stable") {
  CHECK(sample_seed(7, 0) != sample_seed(7, 1));
  CHECK(sample_seed(7, 3) == sample_seed(7, 3));
  CHECK(mix_seed(0) != 0);
}
