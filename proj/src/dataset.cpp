#include "sfr/dataset.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace sfr {

std::string to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::kPointSource:
      return "point_source";
    case SourceKind::kPlaneWaveMix:
      return "plane_wave_mix";
  }
  return "unknown";
}

SourceKind source_kind_from_string(const std::string& name) {
  if (name == "point_source") return SourceKind::kPointSource;
  if (name == "plane_wave_mix") return SourceKind::kPlaneWaveMix;
  throw std::invalid_argument("unknown generator: " + name);
}

std::uint64_t fnv1a64(std::span<const unsigned char> bytes, std::uint64_t state) {
  for (unsigned char b : bytes) {
    state ^= b;
    state *= 0x100000001b3ULL;
  }
  return state;
}

const std::string& Manifest::get(const std::string& key) const {
  for (const auto& [k, v] : entries) {
    if (k == key) return v;
  }
  throw DatasetError("malformed header: missing key '" + key + "'");
}

bool Manifest::has(const std::string& key) const {
  for (const auto& e : entries) {
    if (e.first == key) return true;
  }
  return false;
}

void Manifest::set(const std::string& key, std::string value) {
  for (auto& [k, v] : entries) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  entries.emplace_back(key, std::move(value));
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, const std::string& key) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw DatasetError("malformed header: bad number for '" + key + "'");
  }
  return v;
}

long long parse_int(const std::string& s, const std::string& key) {
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw DatasetError("malformed header: bad integer for '" + key + "'");
  }
  return v;
}

std::uint64_t parse_u64(const std::string& s, const std::string& key) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw DatasetError("malformed header: bad integer for '" + key + "'");
  }
  return v;
}

void append_u64(std::vector<unsigned char>& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<unsigned char>(v >> (8 * b)));
}

std::uint64_t read_u64(std::span<const unsigned char> in, std::size_t& offset) {
  if (offset + 8 > in.size()) throw DatasetError("count mismatch: payload too short");
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(in[offset + b]) << (8 * b);
  offset += 8;
  return v;
}

void append_f64(std::vector<unsigned char>& out, double v) {
  append_u64(out, std::bit_cast<std::uint64_t>(v));
}

double read_f64(std::span<const unsigned char> in, std::size_t& offset) {
  return std::bit_cast<double>(read_u64(in, offset));
}

namespace {

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

}  // namespace

void write_manifest_file(const std::filesystem::path& path, const std::string& magic,
                         const Manifest& manifest, std::span<const unsigned char> payload) {
  std::ostringstream head;
  head << magic << '\n';
  for (const auto& [k, v] : manifest.entries) head << k << ": " << v << '\n';
  head << "checksum: " << hex64(fnv1a64(payload)) << '\n';
  head << "payload_bytes: " << payload.size() << '\n';
  head << "end\n";
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
  const std::string h = head.str();
  os.write(h.data(), static_cast<std::streamsize>(h.size()));
  os.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

Manifest read_manifest_file(const std::filesystem::path& path, const std::string& magic,
                            std::vector<unsigned char>& payload) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DatasetError("cannot open: " + path.string());
  std::string line;
  if (!std::getline(is, line) || line != magic) {
    throw DatasetError("malformed header: expected '" + magic + "'");
  }
  Manifest m;
  bool closed = false;
  while (std::getline(is, line)) {
    if (line == "end") {
      closed = true;
      break;
    }
    const auto colon = line.find(": ");
    if (colon == std::string::npos || colon == 0) {
      throw DatasetError("malformed header line: " + line);
    }
    m.entries.emplace_back(line.substr(0, colon), line.substr(colon + 2));
  }
  if (!closed) throw DatasetError("malformed header: missing 'end'");
  const auto n = parse_u64(m.get("payload_bytes"), "payload_bytes");
  payload.assign(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>());
  if (payload.size() != n) {
    throw DatasetError("count mismatch: expected " + std::to_string(n) + " payload bytes, found " +
                       std::to_string(payload.size()));
  }
  if (hex64(fnv1a64(payload)) != m.get("checksum")) {
    throw DatasetError("checksum failure");
  }
  return m;
}

void write_dataset(const Dataset& ds, const std::filesystem::path& path) {
  const Grid& g = ds.grid;
  std::vector<unsigned char> payload;
  payload.reserve(ds.samples.size() * (5 + 2 * static_cast<std::size_t>(g.size())) * 8);
  for (const auto& s : ds.samples) {
    if (!s.field.matches(g)) throw std::invalid_argument("sample does not match the dataset grid");
    append_f64(payload, static_cast<double>(static_cast<int>(s.meta.kind)));
    append_f64(payload, s.meta.source.x());
    append_f64(payload, s.meta.source.y());
    append_f64(payload, static_cast<double>(s.meta.n_waves));
    append_u64(payload, s.meta.seed);
    for (const Plane* p : {&s.field.re, &s.field.im}) {
      for (int i = 0; i < g.rows(); ++i) {
        for (int j = 0; j < g.cols(); ++j) append_f64(payload, (*p)(i, j));
      }
    }
  }
  Manifest m;
  m.set("rows", std::to_string(g.rows()));
  m.set("cols", std::to_string(g.cols()));
  m.set("spacing_m", format_double(g.spacing()));
  m.set("frequency_hz", format_double(ds.ctx.frequency()));
  m.set("sound_speed_mps", format_double(ds.ctx.sound_speed()));
  m.set("n_samples", std::to_string(ds.samples.size()));
  m.set("n_train", std::to_string(ds.n_train));
  m.set("seed", std::to_string(ds.seed));
  m.set("generator", to_string(ds.generator));
  write_manifest_file(path, "SFDATASET 1", m, payload);
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::vector<unsigned char> payload;
  const Manifest m = read_manifest_file(path, "SFDATASET 1", payload);
  const auto rows = static_cast<int>(parse_int(m.get("rows"), "rows"));
  const auto cols = static_cast<int>(parse_int(m.get("cols"), "cols"));
  const auto n = parse_int(m.get("n_samples"), "n_samples");
  const auto n_train = parse_int(m.get("n_train"), "n_train");
  if (rows < 2 || cols < 2 || n < 0 || n_train < 0 || n_train > n) {
    throw DatasetError("malformed header: inconsistent sizes");
  }
  Dataset ds{Grid(rows, cols, parse_double(m.get("spacing_m"), "spacing_m")),
             WaveContext(parse_double(m.get("frequency_hz"), "frequency_hz"),
                         parse_double(m.get("sound_speed_mps"), "sound_speed_mps")),
             parse_u64(m.get("seed"), "seed"), source_kind_from_string(m.get("generator")),
             static_cast<int>(n_train), {}};
  const std::size_t per_sample = (5 + 2 * static_cast<std::size_t>(rows) * cols) * 8;
  if (payload.size() != per_sample * static_cast<std::size_t>(n)) {
    throw DatasetError("count mismatch: payload holds " + std::to_string(payload.size()) +
                       " bytes for " + std::to_string(n) + " samples");
  }
  std::size_t off = 0;
  ds.samples.reserve(static_cast<std::size_t>(n));
  for (long long s = 0; s < n; ++s) {
    Sample smp;
    smp.meta.kind = static_cast<SourceKind>(static_cast<int>(read_f64(payload, off)));
    smp.meta.source.x() = read_f64(payload, off);
    smp.meta.source.y() = read_f64(payload, off);
    smp.meta.n_waves = static_cast<int>(read_f64(payload, off));
    smp.meta.seed = read_u64(payload, off);
    smp.field = ComplexField::zeros(ds.grid);
    for (Plane* p : {&smp.field.re, &smp.field.im}) {
      for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) (*p)(i, j) = read_f64(payload, off);
      }
    }
    ds.samples.push_back(std::move(smp));
  }
  return ds;
}

}  // namespace sfr
