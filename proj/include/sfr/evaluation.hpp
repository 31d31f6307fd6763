#pragma once

// Test-set evaluation shared by the command-line tool and the acceptance run:
// every method sees the same observation set for a given (M, run, sample).

#include "sfr/dataset.hpp"
#include "sfr/kernel_baseline.hpp"
#include "sfr/metrics.hpp"
#include "sfr/model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sfr {

/// Observation set used to score test sample `sample` at M = m in run `run`.
ObservationSet evaluation_observations(const Dataset& dataset, int m, int run, int sample,
                                       std::uint64_t seed);

/// Throws std::invalid_argument if the checkpoint was trained for another
/// grid or frequency than the dataset holds.
void check_compatible(const ModelParams& params, const Dataset& dataset);

/// Kernel ridge regression on every test sample. Its HE is that of the spline
/// through the estimate with exact boundary derivatives.
std::vector<MetricRecord> evaluate_kernel(const Dataset& dataset, int m, int run,
                                          std::uint64_t seed,
                                          double regularization = kDefaultKernelRegularization);

/// Learned estimator on every test sample. A model trained with lambda = 0
/// carries no trained derivative channels, so its HE uses zero boundary
/// derivatives; otherwise the network's own boundary derivatives are splined.
std::vector<MetricRecord> evaluate_model(const Dataset& dataset, const ModelParams& params,
                                         const std::string& method, int m, int run,
                                         std::uint64_t seed);

DerivativeConvention derivative_convention(const ModelParams& params);

}  // namespace sfr
