#include "sfr/plot.hpp"

#include "sfr/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace sfr {

int gray_level(double v, double vmax) {
  if (!(vmax > 0.0) || !std::isfinite(v)) return kGrayMid;
  const double t = std::clamp(v / vmax, -1.0, 1.0);
  return static_cast<int>(std::lround(kGrayMid + kGrayMid * t));
}

std::string render_pgm(const Plane& values, double vmax, const Plane* marks) {
  if (marks != nullptr && (marks->rows() != values.rows() || marks->cols() != values.cols())) {
    throw std::invalid_argument("marker plane does not match the image");
  }
  std::ostringstream os;
  os << "P2\n" << values.cols() << ' ' << values.rows() << "\n" << kGrayMarker << "\n";
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      const bool marked = marks != nullptr && (*marks)(r, c) != 0.0;
      os << (c ? " " : "") << (marked ? kGrayMarker : gray_level(values(r, c), vmax));
    }
    os << '\n';
  }
  return os.str();
}

void write_pgm(const std::filesystem::path& path, const Plane& values, double vmax,
               const Plane* marks) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
  os << render_pgm(values, vmax, marks);
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

void write_csv_grid(std::ostream& os, const Plane& values) {
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      os << (c ? "," : "") << format_double(values(r, c));
    }
    os << '\n';
  }
}

void write_csv_grid(const std::filesystem::path& path, const Plane& values) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
  write_csv_grid(os, values);
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

Plane read_csv_grid(std::istream& is) {
  std::vector<std::vector<double>> rows;
  for (std::string line; std::getline(is, line);) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) row.push_back(parse_double(cell, "csv"));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::invalid_argument("ragged CSV grid");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) return {};
  Plane p(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      p(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return p;
}

}  // namespace sfr
