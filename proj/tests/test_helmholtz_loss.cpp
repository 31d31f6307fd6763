#include "doctest.h"
#include "support.hpp"

#include "sfr/helmholtz_loss.hpp"
#include "sfr/kernel_baseline.hpp"
#include "sfr/quadrature.hpp"
#include "sfr/simulator.hpp"

#include <cmath>
#include <random>

using namespace sfr;
using sfr::testing::rel_err;

namespace {

const double kK = 2.0 * M_PI * 300.0 / 340.0;

// Gram integrals by brute-force quadrature over [0, l].
Matrix4T<double> gram(double l, int da, int db) {
  const GaussLegendre gl(12, 0.0, l);
  Matrix4T<double> m = Matrix4T<double>::Zero();
  for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
    m += gl.weights[q] * detail::basis_derivative(gl.nodes[q], da) *
         detail::basis_derivative(gl.nodes[q], db).transpose();
  }
  return m;
}

// Each term of the residual expansion, integrated directly.
double term_by_quadrature(const Matrix4T<double>& A, double k, double l, int term) {
  const GaussLegendre gl(6, 0.0, l);
  const double k2 = k * k;
  double acc = 0.0;
  for (std::size_t a = 0; a < gl.nodes.size(); ++a) {
    for (std::size_t b = 0; b < gl.nodes.size(); ++b) {
      const auto gx = detail::basis_derivative(gl.nodes[a], 0);
      const auto gxx = detail::basis_derivative(gl.nodes[a], 2);
      const auto gy = detail::basis_derivative(gl.nodes[b], 0);
      const auto gyy = detail::basis_derivative(gl.nodes[b], 2);
      const double u = gx.dot(A * gy), uxx = gxx.dot(A * gy), uyy = gx.dot(A * gyy);
      const double v[] = {uxx * uxx,      uyy * uyy,          k2 * k2 * u * u,
                          2 * uxx * uyy,  2 * k2 * u * uyy,   2 * k2 * u * uxx};
      acc += gl.weights[a] * gl.weights[b] * v[term];
    }
  }
  return acc;
}

double patch_by_quadrature(const Matrix4T<double>& A, double k, double l, int points) {
  const GaussLegendre gl(points, 0.0, l);
  double acc = 0.0;
  for (std::size_t a = 0; a < gl.nodes.size(); ++a) {
    for (std::size_t b = 0; b < gl.nodes.size(); ++b) {
      const auto gx = detail::basis_derivative(gl.nodes[a], 0);
      const auto gxx = detail::basis_derivative(gl.nodes[a], 2);
      const auto gy = detail::basis_derivative(gl.nodes[b], 0);
      const auto gyy = detail::basis_derivative(gl.nodes[b], 2);
      const double r = gxx.dot(A * gy) + gx.dot(A * gyy) + k * k * gx.dot(A * gy);
      acc += gl.weights[a] * gl.weights[b] * r * r;
    }
  }
  return acc;
}

OutputTensor plane_wave(const Grid& g, double angle) {
  const PlaneWaveMix mix{{angle}, {{1.0, 0.0}}};
  return plane_wave_output(g, WaveContext(300.0, 340.0), mix);
}

}  // namespace

TEST_CASE("C matrices: printed entries") {
  const auto a = c_matrices(0.1);
  CHECK(a.c1(0, 0) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(a.c1(1, 2) == doctest::Approx(std::pow(0.1, 4) / 4).epsilon(1e-15));
  const auto b = c_matrices(1.0);
  CHECK(b.c2(2, 2) == 4.0);
  CHECK(b.c2(3, 3) == 12.0);
  CHECK(b.c3.topRows(2).isZero());
  CHECK_THROWS_AS(c_matrices(0.0), std::invalid_argument);
}

TEST_CASE("C matrices equal their Gram integrals") {
  for (double l : {0.1, 0.5, 1.0}) {
    const auto cm = c_matrices(l);
    const Matrix4T<double> q[] = {gram(l, 0, 0), gram(l, 2, 2), gram(l, 2, 0)};
    const Matrix4T<double>* c[] = {&cm.c1, &cm.c2, &cm.c3};
    for (int m = 0; m < 3; ++m) {
      for (int r = 0; r < 4; ++r) {
        for (int s = 0; s < 4; ++s) {
          const double want = q[m](r, s), got = (*c[m])(r, s);
          if (want == 0.0 || std::abs(want) < 1e-300) {
            CHECK(std::abs(got) <= 1e-15);
          } else {
            CHECK(rel_err(got, want) <= 1e-13);
          }
        }
      }
    }
    CHECK(cm.c1.llt().info() == Eigen::Success);
  }
}

TEST_CASE("each closed-form term matches its own quadrature") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const auto A = testing::random_matrix4(rng);
    for (double l : {0.1, 0.5}) {
      for (double k : {1.0, 5.545}) {
        const auto cm = c_matrices(l);
        for (int t = 0; t < 6; ++t) {
          const double want = term_by_quadrature(A, k, l, t);
          const double got = patch_he_term(A, cm, k, t);
          CHECK(std::abs(got - want) <= 1e-11 * std::max(std::abs(want), 1e-300) + 1e-300);
        }
      }
    }
  }
}

TEST_CASE("patch integral: trivial cases") {
  const auto cm = c_matrices(0.3);
  CHECK(patch_he_integral<double>(Matrix4T<double>::Zero(), cm, 2.0) == 0.0);
  Matrix4T<double> A = Matrix4T<double>::Zero();
  A(0, 0) = 1.0;
  CHECK(patch_he_integral(A, cm, 2.0) == doctest::Approx(16.0 * 0.09).epsilon(1e-14));
}

TEST_CASE("patch integral equals 4-point quadrature over random triples") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> uk(0.5, 12.0), ul(0.02, 1.5);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto A = testing::random_matrix4(rng);
    const double k = uk(rng), l = ul(rng);
    const double got = patch_he_integral(A, c_matrices(l), k);
    worst = std::max(worst, rel_err(got, patch_by_quadrature(A, k, l, 4)));
  }
  CHECK(worst <= 1e-11);
}

TEST_CASE("at k = 0 only the curvature terms survive") {
  std::mt19937_64 rng(23);
  const auto A = testing::random_matrix4(rng);
  const auto cm = c_matrices(0.4);
  const double want = patch_he_term(A, cm, 0.0, 0) + patch_he_term(A, cm, 0.0, 1) +
                      patch_he_term(A, cm, 0.0, 3);
  CHECK(patch_he_integral(A, cm, 0.0) == doctest::Approx(want).epsilon(1e-14));
  for (int t : {2, 4, 5}) CHECK(patch_he_term(A, cm, 0.0, t) == 0.0);
}

TEST_CASE("patch gradient matches finite differences") {
  std::mt19937_64 rng(24);
  const auto A = testing::random_matrix4(rng);
  const auto cm = c_matrices(0.2);
  const auto g = patch_he_gradient(A, cm, kK);
  const double h = 1e-6;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      Matrix4T<double> ap = A, am = A;
      ap(r, c) += h;
      am(r, c) -= h;
      const double fd = (patch_he_integral(ap, cm, kK) - patch_he_integral(am, cm, kK)) / (2 * h);
      CHECK(rel_err(fd, g(r, c)) <= 1e-6);
    }
  }
}

TEST_CASE("field loss: zero, quadrature agreement, homogeneity and symmetry") {
  const Grid g(9, 8, 0.15);
  CHECK(he_loss(OutputTensor::zeros(g), g, kK) == 0.0);
  CHECK(he_loss_quadrature(interpolate_output(OutputTensor::zeros(g), g), kK, 4) == 0.0);

  std::mt19937_64 rng(25);
  const auto out = testing::random_output(g, rng);
  const auto sf = interpolate_output(out, g);
  const double a = he_loss(sf, kK);
  CHECK(a > 0.0);
  CHECK(std::abs(a - he_loss_quadrature(sf, kK, 4)) <= 1e-10 * (1.0 + a));
  CHECK(rel_err(he_loss_quadrature(sf, kK, 4), he_loss_quadrature(sf, kK, 8)) <= 1e-12);
  CHECK(rel_err(he_loss(out.scaled(-2.5), g, kK), 6.25 * a) <= 1e-13);

  OutputTensor swapped = out;
  for (int c = 0; c < kOutputChannels; c += 2) std::swap(swapped[c], swapped[c + 1]);
  CHECK(rel_err(he_loss(swapped, g, kK), a) <= 1e-14);
}

TEST_CASE("plane-wave residual shrinks as l^4") {
  // same 3.1 m region at l and l/2, oblique incidence
  const Grid coarse(32, 32, 0.1), fine(63, 63, 0.05);
  const double angle = 0.3;
  const double hc = he_loss(plane_wave(coarse, angle), coarse, kK);
  const double hf = he_loss(plane_wave(fine, angle), fine, kK);
  CHECK(hc > 0.0);
  const double ratio = hc / hf;
  MESSAGE("refinement ratio " << ratio);
  CHECK(ratio >= 8.0);
  CHECK(ratio <= 32.0);
}

TEST_CASE("exact boundary derivatives lower the residual of a kernel estimate") {
  const Grid g(16, 16, 0.1);
  const WaveContext ctx(300.0, 340.0);
  std::mt19937_64 rng(26);
  const auto field = plane_wave_field(g, ctx, random_plane_wave_mix(5, rng));
  const auto obs = sample_observations(g, field, 10, std::uint64_t{4});
  const auto est = KernelEstimator::fit(obs, g, ctx);
  const OutputTensor exact = est.predict_output(g);
  OutputTensor zero = exact;
  zero.zero_derivatives();
  CHECK(he_loss(exact, g, ctx.wavenumber()) <= he_loss(zero, g, ctx.wavenumber()));
}

TEST_CASE("loss gradient: zero point, linearity, support") {
  const Grid g(7, 6, 0.2);
  const auto z = he_loss_gradient(OutputTensor::zeros(g), g, kK);
  for (const auto& c : z.channels) CHECK(c.isZero());

  std::mt19937_64 rng(27);
  const auto out = testing::random_output(g, rng);
  const auto g1 = he_loss_gradient(out, g, kK);
  const auto g2 = he_loss_gradient(out.scaled(2.0), g, kK);
  for (int c = 0; c < kOutputChannels; ++c)
    CHECK((g2[c] - 2.0 * g1[c]).cwiseAbs().maxCoeff() <= 1e-12 * g2[c].cwiseAbs().maxCoeff() + 1e-300);

  OutputTensor masked = g1;
  masked.mask_derivatives();
  for (int c = 0; c < kOutputChannels; ++c) CHECK(masked[c] == g1[c]);
  // Euler: <grad, U> = 2 L for a quadratic form
  CHECK(rel_err(g1.dot(out), 2.0 * he_loss(out, g, kK)) <= 1e-12);
}

TEST_CASE("loss gradient matches central differences on 50 entries") {
  const Grid g(8, 9, 0.12);
  std::mt19937_64 rng(28);
  const auto out = testing::random_output(g, rng);
  const auto grad = he_loss_gradient(out, g, kK);

  // candidate coordinates: every entry the loss depends on
  std::vector<std::tuple<int, int, int>> coords;
  for (int c = 0; c < kOutputChannels; ++c)
    for (int i = 0; i < g.rows(); ++i)
      for (int j = 0; j < g.cols(); ++j) {
        OutputTensor probe(g.rows(), g.cols());
        probe[c](i, j) = 1.0;
        probe.mask_derivatives();
        if (probe[c](i, j) != 0.0) coords.emplace_back(c, i, j);
      }
  std::shuffle(coords.begin(), coords.end(), rng);
  coords.resize(50);

  const double h = 1e-5;
  double worst = 0.0;
  for (auto [c, i, j] : coords) {
    OutputTensor p = out, m = out;
    p[c](i, j) += h;
    m[c](i, j) -= h;
    const double fd = (he_loss(p, g, kK) - he_loss(m, g, kK)) / (2 * h);
    worst = std::max(worst, rel_err(fd, grad[c](i, j)));
  }
  MESSAGE("worst relative error " << worst);
  CHECK(worst <= 1e-5);
}
