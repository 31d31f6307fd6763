#include "sfr/evaluation.hpp"

#include "sfr/simulator.hpp"

#include <stdexcept>

namespace sfr {

ObservationSet evaluation_observations(const Dataset& dataset, int m, int run, int sample,
                                       std::uint64_t seed) {
  const auto test = dataset.test();
  const auto s = static_cast<std::size_t>(sample);
  if (s >= test.size()) throw std::out_of_range("test sample index out of range");
  const std::uint64_t key =
      sample_seed(mix_seed(seed ^ (static_cast<std::uint64_t>(m) << 32)) ^ static_cast<std::uint64_t>(run),
                  static_cast<std::uint64_t>(sample));
  return sample_observations(dataset.grid, test[s].field, m, key);
}

void check_compatible(const ModelParams& params, const Dataset& dataset) {
  const ModelSpec& s = params.spec;
  if (!(s.grid() == dataset.grid)) {
    throw std::invalid_argument("checkpoint/dataset mismatch: grid differs");
  }
  if (s.frequency != dataset.ctx.frequency() || s.sound_speed != dataset.ctx.sound_speed()) {
    throw std::invalid_argument("checkpoint/dataset mismatch: frequency or sound speed differs");
  }
}

DerivativeConvention derivative_convention(const ModelParams& params) {
  return params.lambda > 0.0 ? DerivativeConvention::kUseChannels : DerivativeConvention::kZero;
}

std::vector<MetricRecord> evaluate_kernel(const Dataset& dataset, int m, int run,
                                          std::uint64_t seed, double regularization) {
  std::vector<MetricRecord> out;
  const auto test = dataset.test();
  for (std::size_t s = 0; s < test.size(); ++s) {
    const auto obs = evaluation_observations(dataset, m, run, static_cast<int>(s), seed);
    const auto est = KernelEstimator::fit(obs, dataset.grid, dataset.ctx, regularization);
    const OutputTensor o = est.predict_output(dataset.grid);
    out.push_back({"kernel", m, run, static_cast<int>(s), nmse_db(o.pressure(), test[s].field),
                   log10_floored(he_metric(o, dataset.grid, dataset.ctx,
                                           DerivativeConvention::kUseChannels))});
  }
  return out;
}

std::vector<MetricRecord> evaluate_model(const Dataset& dataset, const ModelParams& params,
                                         const std::string& method, int m, int run,
                                         std::uint64_t seed) {
  check_compatible(params, dataset);
  const auto convention = derivative_convention(params);
  std::vector<MetricRecord> out;
  const auto test = dataset.test();
  for (std::size_t s = 0; s < test.size(); ++s) {
    const auto obs = evaluation_observations(dataset, m, run, static_cast<int>(s), seed);
    const Estimate e = estimate(params, obs);
    out.push_back({method, m, run, static_cast<int>(s), nmse_db(e.field, test[s].field),
                   log10_floored(he_metric(e.output, dataset.grid, dataset.ctx, convention))});
  }
  return out;
}

}  // namespace sfr
