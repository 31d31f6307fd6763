#pragma once

// Static figure output: plain-text graymap (PGM, "P2") heatmaps and CSV grids.
// Image row r is grid row i (x), image column is j (y).

#include "sfr/core.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace sfr {

inline constexpr int kGrayMid = 127;
inline constexpr int kGrayMarker = 255;

/// Gray level of v on the symmetric range [-vmax, vmax]: 0 .. 254, with 0
/// mapped to kGrayMid. A non-positive vmax renders everything mid-gray.
int gray_level(double v, double vmax);

/// PGM text of `values`. Nodes where `marks` is nonzero are drawn at
/// kGrayMarker, one level above any data pixel.
std::string render_pgm(const Plane& values, double vmax, const Plane* marks = nullptr);
void write_pgm(const std::filesystem::path& path, const Plane& values, double vmax,
               const Plane* marks = nullptr);

/// Rows of comma-separated values with round-trip precision.
void write_csv_grid(std::ostream& os, const Plane& values);
void write_csv_grid(const std::filesystem::path& path, const Plane& values);
Plane read_csv_grid(std::istream& is);

}  // namespace sfr
