#include "doctest.h"
#include "support.hpp"

#include "sfr/plot.hpp"
#include "sfr/simulator.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace sfr;

namespace {

std::vector<int> pixels(const std::string& pgm, int& width, int& height) {
  std::istringstream is(pgm);
  std::string magic;
  int maxval = 0;
  is >> magic >> width >> height >> maxval;
  REQUIRE(magic == "P2");
  REQUIRE(maxval == kGrayMarker);
  std::vector<int> px(static_cast<std::size_t>(width * height));
  for (auto& p : px) is >> p;
  return px;
}

}  // namespace

TEST_CASE("zero field renders uniform mid-gray") {
  int w = 0, h = 0;
  const auto px = pixels(render_pgm(Plane::Zero(5, 7), 0.0), w, h);
  CHECK(w == 7);
  CHECK(h == 5);
  for (int p : px) CHECK(p == kGrayMid);
  for (int p : pixels(render_pgm(Plane::Zero(3, 3), 2.0), w, h)) CHECK(p == kGrayMid);
}

TEST_CASE("observation points are drawn at maximum intensity") {
  Plane v = Plane::Constant(4, 4, 1.0);
  Plane marks = Plane::Zero(4, 4);
  marks(2, 1) = 1.0;
  int w = 0, h = 0;
  const auto px = pixels(render_pgm(v, 1.0, &marks), w, h);
  CHECK(px[2 * 4 + 1] == kGrayMarker);
  CHECK(px[0] == 254);
  CHECK(gray_level(-1.0, 1.0) == 0);
  CHECK(gray_level(-7.0, 1.0) == 0);
}

TEST_CASE("plane-wave stripes repeat every wavelength / spacing pixels") {
  const Grid g(64, 8, 0.1);
  const WaveContext ctx(300.0, 340.0);
  const auto f = plane_wave_field(g, ctx, {{0.0}, {{1.0, 0.0}}});
  int w = 0, h = 0;
  const auto px = pixels(render_pgm(f.re, 1.0), w, h);
  // rising crossings of mid-gray along the image rows (x direction)
  std::vector<double> up;
  for (int r = 0; r + 1 < h; ++r) {
    const double a = f.re(r, 0), b = f.re(r + 1, 0);
    if (a < 0.0 && b >= 0.0) up.push_back(r + a / (a - b));
    CHECK(px[static_cast<std::size_t>(r * w)] == px[static_cast<std::size_t>(r * w + w - 1)]);
  }
  REQUIRE(up.size() >= 3);
  const double period = (up.back() - up.front()) / static_cast<double>(up.size() - 1);
  CHECK(period == doctest::Approx(ctx.wavelength() / g.spacing()).epsilon(0.01));
  CHECK(period == doctest::Approx(11.3).epsilon(0.01));
}

TEST_CASE("CSV grid round trip is exact") {
  std::mt19937_64 rng(71);
  const Plane p = testing::random_plane(6, 9, rng, 1e3);
  std::stringstream ss;
  write_csv_grid(ss, p);
  const Plane back = read_csv_grid(ss);
  CHECK(back == p);
}
