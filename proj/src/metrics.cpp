#include "sfr/metrics.hpp"

#include "sfr/helmholtz_loss.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <stdexcept>

namespace sfr {

double nmse_db(const ComplexField& estimate, const ComplexField& truth) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols()) {
    throw std::invalid_argument("estimate and truth differ in shape");
  }
  const double energy = truth.energy();
  if (!(energy > 0.0)) throw std::invalid_argument("NMSE undefined for a zero-energy truth");
  const double err = (estimate.re - truth.re).squaredNorm() + (estimate.im - truth.im).squaredNorm();
  const double ratio = err / energy;
  if (!(ratio > 0.0)) return kLogFloor;
  return std::max(10.0 * std::log10(ratio), kLogFloor);
}

double log10_floored(double v) {
  if (!(v > 0.0)) return kLogFloor;
  return std::max(std::log10(v), kLogFloor);
}

double he_metric(const OutputTensor& estimate, const Grid& grid, const WaveContext& ctx,
                 DerivativeConvention convention) {
  if (convention == DerivativeConvention::kZero) {
    OutputTensor zeroed = estimate;
    zeroed.zero_derivatives();
    return he_loss(zeroed, grid, ctx.wavenumber());
  }
  return he_loss(estimate, grid, ctx.wavenumber());
}

MeanStd aggregate(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("aggregate needs at least one value");
  MeanStd r;
  r.count = static_cast<int>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  r.mean = sum / r.count;
  if (r.count > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - r.mean) * (v - r.mean);
    r.std = std::sqrt(ss / (r.count - 1));
  }
  return r;
}

ResultTable ResultTable::from_records(std::span<const MetricRecord> records) {
  ResultTable t;
  std::map<int, std::map<std::string, std::vector<double>>> nmse, he;
  for (const auto& r : records) {
    if (std::find(t.methods.begin(), t.methods.end(), r.method) == t.methods.end()) {
      t.methods.push_back(r.method);
    }
    nmse[r.m][r.method].push_back(r.nmse_db);
    he[r.m][r.method].push_back(r.he_log10);
  }
  for (const auto& [m, by_method] : nmse) {
    for (const auto& [method, v] : by_method) t.nmse[m][method] = aggregate(v);
  }
  for (const auto& [m, by_method] : he) {
    for (const auto& [method, v] : by_method) t.he[m][method] = aggregate(v);
  }
  return t;
}

void write_records_csv(std::ostream& os, std::span<const MetricRecord> records) {
  os << "method,M,run,sample,nmse_db,he_log10\n";
  os << std::setprecision(17);
  for (const auto& r : records) {
    os << r.method << ',' << r.m << ',' << r.run << ',' << r.sample << ',' << r.nmse_db << ','
       << r.he_log10 << '\n';
  }
}

void write_table_csv(std::ostream& os, const ResultTable& table) {
  os << "M";
  for (const auto& m : table.methods) os << ',' << m << "_nmse_mean," << m << "_nmse_std";
  for (const auto& m : table.methods) os << ',' << m << "_he_mean," << m << "_he_std";
  os << '\n' << std::fixed << std::setprecision(4);
  for (const auto& [m, row] : table.nmse) {
    os << m;
    for (const auto& method : table.methods) {
      const auto it = row.find(method);
      if (it == row.end()) {
        os << ",,";
      } else {
        os << ',' << it->second.mean << ',' << it->second.std;
      }
    }
    const auto& he_row = table.he.at(m);
    for (const auto& method : table.methods) {
      const auto it = he_row.find(method);
      if (it == he_row.end()) {
        os << ",,";
      } else {
        os << ',' << it->second.mean << ',' << it->second.std;
      }
    }
    os << '\n';
  }
  os.unsetf(std::ios::fixed);
}

}  // namespace sfr
