#pragma once

#include "sfr/core.hpp"

#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace sfr {

/// Floor reported in place of -infinity on logarithmic scales.
inline constexpr double kLogFloor = -300.0;

/// 10 log10( sum |u_hat - u|^2 / sum |u|^2 ) over all nodes.
double nmse_db(const ComplexField& estimate, const ComplexField& truth);

enum class DerivativeConvention {
  kUseChannels,  // spline the boundary derivatives carried by the estimate
  kZero,         // pressure-only estimate: boundary derivatives set to 0
};

/// Helmholtz error of the spline interpolant of an estimate (same quantity as
/// the training loss L_H).
double he_metric(const OutputTensor& estimate, const Grid& grid, const WaveContext& ctx,
                 DerivativeConvention convention);
/// log10 of a nonnegative value, floored at kLogFloor.
double log10_floored(double v);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
  int count = 0;
};

/// Mean and sample standard deviation (n - 1 denominator; 0 for one value).
MeanStd aggregate(std::span<const double> values);

/// Per-sample metric record.
struct MetricRecord {
  std::string method;
  int m = 0;
  int run = 0;     // training repetition or trial index
  int sample = 0;  // test-sample index
  double nmse_db = 0.0;
  double he_log10 = 0.0;
};

/// Aggregated table: one row per M with mean +- std for every method.
struct ResultTable {
  std::vector<std::string> methods;
  std::map<int, std::map<std::string, MeanStd>> nmse;
  std::map<int, std::map<std::string, MeanStd>> he;

  static ResultTable from_records(std::span<const MetricRecord> records);
};

void write_records_csv(std::ostream& os, std::span<const MetricRecord> records);
/// Columns: M, then "<method>_nmse_mean, <method>_nmse_std" and the same for
/// log10 HE, per method in first-seen order.
void write_table_csv(std::ostream& os, const ResultTable& table);

}  // namespace sfr
