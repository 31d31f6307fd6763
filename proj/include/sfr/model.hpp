#pragma once

// Fully convolutional estimator mapping the 3-channel observation tensor
// (Re, Im, mask) to the 8-channel output tensor, with hand-written reverse
// mode differentiation and Adam training on L = L_D + lambda L_H.

#include "sfr/core.hpp"
#include "sfr/dataset.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

namespace sfr {

/// Three I x J planes: standardized observation Re/Im and the 0/1 mask.
struct InputTensor {
  Plane obs_re;
  Plane obs_im;
  Plane mask;

  /// Observation values divided by `scale`, zero elsewhere.
  static InputTensor from_observations(const Grid& grid, const ObservationSet& obs, double scale);
};

/// Architecture: dilated 3x3 "same" convolutions with the given channel
/// widths and per-layer dilations, leaky-rectifier activations between layers
/// and a linear output layer. The default stack sees 39 x 39 nodes.
/// Output channel c is multiplied by derivative_scale^d, d being its
/// derivative order (0 for u, 1 for u_x and u_y, 2 for u_xy).
struct ModelSpec {
  std::vector<int> widths{3, 32, 32, 32, 32, 32, 8};
  std::vector<int> dilations{1, 2, 4, 8, 2, 1};
  double leaky_slope = 0.1;
  double derivative_scale = 1.0;
  int rows = 0;
  int cols = 0;
  double spacing = 0.0;
  double frequency = 0.0;
  double sound_speed = 0.0;

  static ModelSpec for_problem(const Grid& grid, const WaveContext& ctx);

  int layer_count() const { return static_cast<int>(widths.size()) - 1; }
  std::size_t parameter_count() const;
  /// Offset of the weight block of layer l in the flat parameter vector;
  /// the bias block follows it.
  std::size_t weight_offset(int layer) const;
  int dilation(int layer) const;
  double output_scale(int channel) const;

  Grid grid() const { return {rows, cols, spacing}; }
  WaveContext context() const { return {frequency, sound_speed}; }
};

/// Flat parameter vector plus its architecture. Layer l stores a
/// widths[l+1] x (widths[l] * 9) column-major weight matrix, with column index
/// c * 9 + (di + 1) * 3 + (dj + 1), followed by widths[l+1] biases.
struct ModelParams {
  ModelSpec spec;
  Eigen::VectorXd values;
  std::uint64_t seed = 0;
  int epoch = 0;
  double lambda = 0.0;  // weight of L_H used in training; 0 for the baseline

  static ModelParams initialize(const ModelSpec& spec, std::uint64_t seed);

  Eigen::Map<const Eigen::MatrixXd> weight(int layer) const;
  Eigen::Map<const Eigen::VectorXd> bias(int layer) const;
  Eigen::Map<Eigen::MatrixXd> weight(int layer);
  Eigen::Map<Eigen::VectorXd> bias(int layer);
};

/// Row-major (channels, I * J) activation storage.
using FeatureMap = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Intermediate values of a forward pass needed by backward. Reusing one
/// cache across calls keeps its buffers allocated.
struct ForwardCache {
  std::vector<FeatureMap> patches;      // im2col of each layer input
  std::vector<FeatureMap> preact;       // pre-activation of each layer
  std::vector<FeatureMap> activations;  // hidden-layer outputs
};

OutputTensor forward(const ModelParams& params, const InputTensor& input,
                     ForwardCache* cache = nullptr);

/// (1/N) sum |u_hat - u|^2 over the pressure channels.
double data_loss(const OutputTensor& out, const ComplexField& truth);
OutputTensor data_loss_gradient(const OutputTensor& out, const ComplexField& truth);

struct LossParts {
  double total = 0.0;
  double data = 0.0;
  double helmholtz = 0.0;
};

/// L = L_D + lambda L_H.
LossParts total_loss(const OutputTensor& out, const ComplexField& truth, const Grid& grid,
                     const WaveContext& ctx, double lambda);

struct Gradient {
  LossParts loss;
  Eigen::VectorXd values;
};

/// Gradient of total_loss with respect to every model parameter.
Gradient backward(const ModelParams& params, const InputTensor& input, const ComplexField& truth,
                  double lambda, ForwardCache* workspace = nullptr);

/// Parameter gradient from an arbitrary seed on the output tensor.
Eigen::VectorXd backward_from_output(const ModelParams& params, const ForwardCache& cache,
                                     const OutputTensor& output_grad);

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long long step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState zeros(Eigen::Index n) {
    return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), 0};
  }
};

/// Bias-corrected Adam update of `params` in place.
void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grads, AdamState& state, double lr);

struct TrainConfig {
  double lambda = 1e-5;
  double learning_rate = 0.01;
  int epochs = 5000;
  int m = 10;
  std::uint64_t seed = 0;
  bool resample_observations_each_epoch = true;
  bool phase_randomize = true;
  ModelSpec spec;  // widths and leaky slope; geometry is taken from the dataset
};

struct EpochLog {
  int epoch = 0;
  double loss = 0.0;
  double data = 0.0;
  double helmholtz = 0.0;
};

struct TrainResult {
  ModelParams params;
  std::vector<EpochLog> log;
};

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-sample Adam updates over the training split in a seeded shuffled
/// order. Throws TrainingDiverged if the loss becomes non-finite.
TrainResult train(const Dataset& dataset, const TrainConfig& config,
                  const std::function<void(const EpochLog&)>& on_epoch = {});

struct Estimate {
  ComplexField field;
  OutputTensor output;  // un-scaled network output, all 8 channels
  double scale = 1.0;
};

/// Standardize the observations, run the network, undo the scaling.
Estimate estimate(const ModelParams& params, const ObservationSet& obs);

void write_checkpoint(const ModelParams& params, const std::filesystem::path& path);
ModelParams read_checkpoint(const std::filesystem::path& path);

void write_loss_log_csv(std::ostream& os, const std::vector<EpochLog>& log);

}  // namespace sfr
