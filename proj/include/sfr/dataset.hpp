#pragma once

#include "sfr/core.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sfr {

enum class SourceKind : int { kPointSource = 0, kPlaneWaveMix = 1 };

std::string to_string(SourceKind kind);
SourceKind source_kind_from_string(const std::string& name);

/// Generator parameters recorded with each sample.
struct SampleMeta {
  SourceKind kind = SourceKind::kPointSource;
  Point2 source = Point2::Zero();  // point source position; zero for plane-wave mixes
  int n_waves = 0;
  std::uint64_t seed = 0;          // per-sample generator seed
};

struct Sample {
  ComplexField field;
  SampleMeta meta;
};

/// Samples sharing one grid and wave context. The first n_train samples form
/// the training split, the rest the test split.
struct Dataset {
  Grid grid;
  WaveContext ctx;
  std::uint64_t seed = 0;
  SourceKind generator = SourceKind::kPointSource;
  int n_train = 0;
  std::vector<Sample> samples;

  std::span<const Sample> train() const {
    return std::span<const Sample>(samples).first(static_cast<std::size_t>(n_train));
  }
  std::span<const Sample> test() const {
    return std::span<const Sample>(samples).subspan(static_cast<std::size_t>(n_train));
  }
};

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File layout: an ASCII manifest of "key: value" lines opened by the line
/// "SFDATASET 1" and closed by "end", then payload_bytes bytes of
/// little-endian float64. Per sample the payload holds 4 metadata values
/// (kind, source x, source y, n_waves), 1 seed word (raw uint64), then the
/// real plane and the imaginary plane, each row-major over (i, j).
void write_dataset(const Dataset& dataset, const std::filesystem::path& path);
Dataset read_dataset(const std::filesystem::path& path);

/// FNV-1a 64-bit hash, used as the payload checksum.
std::uint64_t fnv1a64(std::span<const unsigned char> bytes,
                      std::uint64_t state = 0xcbf29ce484222325ULL);

/// "key: value" manifest parsing shared by the dataset and checkpoint files.
struct Manifest {
  std::vector<std::pair<std::string, std::string>> entries;

  const std::string& get(const std::string& key) const;
  bool has(const std::string& key) const;
  void set(const std::string& key, std::string value);
};

std::string format_double(double v);
double parse_double(const std::string& s, const std::string& key);
long long parse_int(const std::string& s, const std::string& key);
std::uint64_t parse_u64(const std::string& s, const std::string& key);

/// Little-endian float64 (de)serialization.
void append_f64(std::vector<unsigned char>& out, double v);
double read_f64(std::span<const unsigned char> in, std::size_t& offset);
void append_u64(std::vector<unsigned char>& out, std::uint64_t v);
std::uint64_t read_u64(std::span<const unsigned char> in, std::size_t& offset);

/// Writes "<magic>\n" + manifest lines + "payload_bytes: n\nend\n" + payload.
void write_manifest_file(const std::filesystem::path& path, const std::string& magic,
                         const Manifest& manifest, std::span<const unsigned char> payload);
/// Inverse of write_manifest_file; validates magic, length and checksum.
Manifest read_manifest_file(const std::filesystem::path& path, const std::string& magic,
                            std::vector<unsigned char>& payload);

}  // namespace sfr
