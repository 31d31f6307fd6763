#include "doctest.h"

#include "sfr/dataset.hpp"
#include "sfr/simulator.hpp"

#include <filesystem>
#include <fstream>
#include <iterator>

using namespace sfr;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "sfr_dataset_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

void spit(const fs::path& p, const std::string& bytes) {
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  os << bytes;
}

}  // namespace

TEST_CASE("round trip preserves every bit") {
  const Grid g(16, 12, 0.2);
  const WaveContext ctx(300.0, 340.0);
  const auto ds = generate_dataset(g, ctx, 128, {}, 11);
  const auto path = scratch("roundtrip.sfd");
  write_dataset(ds, path);
  const auto back = read_dataset(path);
  CHECK(back.grid == ds.grid);
  CHECK(back.ctx.frequency() == 300.0);
  CHECK(back.ctx.sound_speed() == 340.0);
  CHECK(back.seed == 11);
  CHECK(back.n_train == 64);
  REQUIRE(back.samples.size() == 128);
  for (std::size_t n = 0; n < ds.samples.size(); ++n) {
    const auto& a = ds.samples[n];
    const auto& b = back.samples[n];
    CHECK(std::memcmp(a.field.re.data(), b.field.re.data(), sizeof(double) * a.field.re.size()) == 0);
    CHECK(std::memcmp(a.field.im.data(), b.field.im.data(), sizeof(double) * a.field.im.size()) == 0);
    CHECK(a.meta.source == b.meta.source);
    CHECK(a.meta.seed == b.meta.seed);
    CHECK(a.meta.kind == b.meta.kind);
  }
}

TEST_CASE("plane-wave datasets round trip too") {
  GeneratorConfig cfg;
  cfg.kind = SourceKind::kPlaneWaveMix;
  cfg.n_waves = 3;
  const auto ds = generate_dataset(Grid(5, 6, 0.3), WaveContext(200.0, 343.0), 4, cfg, 2);
  const auto path = scratch("mix.sfd");
  write_dataset(ds, path);
  const auto back = read_dataset(path);
  CHECK(back.generator == SourceKind::kPlaneWaveMix);
  CHECK(back.samples[3].meta.n_waves == 3);
  CHECK(back.samples[3].field.re == ds.samples[3].field.re);
}

TEST_CASE("manifest reports the sample count") {
  const auto ds = generate_dataset(Grid(4, 4, 0.2), WaveContext(300.0, 340.0), 256, {}, 1);
  const auto path = scratch("count.sfd");
  write_dataset(ds, path);
  const std::string text = slurp(path);
  CHECK(text.rfind("SFDATASET 1\n", 0) == 0);
  CHECK(text.find("n_samples: 256\n") != std::string::npos);
  CHECK(text.find("n_train: 128\n") != std::string::npos);
}

TEST_CASE("writes are byte-identical for equal seeds") {
  const Grid g(8, 8, 0.2);
  const WaveContext ctx(300.0, 340.0);
  const auto a = scratch("a.sfd"), b = scratch("b.sfd");
  write_dataset(generate_dataset(g, ctx, 16, {}, 5), a);
  write_dataset(generate_dataset(g, ctx, 16, {}, 5), b);
  CHECK(slurp(a) == slurp(b));
}

TEST_CASE("damaged files are reported") {
  const auto ds = generate_dataset(Grid(6, 6, 0.2), WaveContext(300.0, 340.0), 8, {}, 3);
  const auto path = scratch("damaged.sfd");
  write_dataset(ds, path);
  const std::string good = slurp(path);

  spit(path, good.substr(0, good.size() - 100));
  CHECK_THROWS_WITH_AS(read_dataset(path), doctest::Contains("count mismatch"), DatasetError);

  std::string flipped = good;
  flipped[flipped.size() - 3] ^= 0x10;
  spit(path, flipped);
  CHECK_THROWS_WITH_AS(read_dataset(path), doctest::Contains("checksum"), DatasetError);

  spit(path, "SFDATASET 2\nend\n");
  CHECK_THROWS_WITH_AS(read_dataset(path), doctest::Contains("malformed header"), DatasetError);

  std::string no_rows = good;
  no_rows.replace(no_rows.find("rows:"), 5, "rowz:");
  spit(path, no_rows);
  CHECK_THROWS_AS(read_dataset(path), DatasetError);

  CHECK_THROWS_AS(read_dataset(scratch("missing.sfd")), DatasetError);
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300}) CHECK(parse_double(format_double(v), "v") == v);
  CHECK_THROWS_AS(parse_double("1.5x", "v"), DatasetError);
  CHECK_THROWS_AS(parse_int("", "n"), DatasetError);
  CHECK(source_kind_from_string(to_string(SourceKind::kPlaneWaveMix)) == SourceKind::kPlaneWaveMix);
  CHECK_THROWS(source_kind_from_string("fem"));
}

TEST_CASE("FNV-1a reference values") {
  const std::string empty;
  const std::string a = "a";
  auto bytes = [](const std::string& s) {
    return std::span<const unsigned char>(reinterpret_cast<const unsigned char*>(s.data()), s.size());
  };
  CHECK(fnv1a64(bytes(empty)) == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64(bytes(a)) == 0xaf63dc4c8601ec8cULL);
}
