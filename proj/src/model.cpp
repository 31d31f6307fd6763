#include "sfr/model.hpp"

#include "sfr/helmholtz_loss.hpp"
#include "sfr/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace sfr {

InputTensor InputTensor::from_observations(const Grid& grid, const ObservationSet& obs,
                                           double scale) {
  InputTensor in{Plane::Zero(grid.rows(), grid.cols()), Plane::Zero(grid.rows(), grid.cols()),
                 obs.mask()};
  const double inv = 1.0 / scale;
  for (int m = 0; m < obs.size(); ++m) {
    const auto& idx = obs.indices()[static_cast<std::size_t>(m)];
    in.obs_re(idx.i, idx.j) = obs.values()[static_cast<std::size_t>(m)].real() * inv;
    in.obs_im(idx.i, idx.j) = obs.values()[static_cast<std::size_t>(m)].imag() * inv;
  }
  return in;
}

ModelSpec ModelSpec::for_problem(const Grid& grid, const WaveContext& ctx) {
  ModelSpec s;
  s.derivative_scale = ctx.wavenumber();
  s.rows = grid.rows();
  s.cols = grid.cols();
  s.spacing = grid.spacing();
  s.frequency = ctx.frequency();
  s.sound_speed = ctx.sound_speed();
  return s;
}

std::size_t ModelSpec::parameter_count() const { return weight_offset(layer_count()); }

std::size_t ModelSpec::weight_offset(int layer) const {
  std::size_t off = 0;
  for (int l = 0; l < layer; ++l) {
    const auto in = static_cast<std::size_t>(widths[static_cast<std::size_t>(l)]);
    const auto out = static_cast<std::size_t>(widths[static_cast<std::size_t>(l) + 1]);
    off += out * in * 9 + out;
  }
  return off;
}

int ModelSpec::dilation(int layer) const {
  const auto l = static_cast<std::size_t>(layer);
  return l < dilations.size() ? dilations[l] : 1;
}

double ModelSpec::output_scale(int channel) const {
  switch (channel) {
    case kURe:
    case kUIm:
      return 1.0;
    case kUxyRe:
    case kUxyIm:
      return derivative_scale * derivative_scale;
    default:
      return derivative_scale;
  }
}

ModelParams ModelParams::initialize(const ModelSpec& spec, std::uint64_t seed) {
  if (spec.widths.size() < 2 || spec.widths.front() != 3 || spec.widths.back() != kOutputChannels) {
    throw std::invalid_argument("architecture must map 3 input channels to 8 output channels");
  }
  for (int d : spec.dilations) {
    if (d < 1) throw std::invalid_argument("dilations must be positive");
  }
  if (!(spec.leaky_slope >= 0.0 && spec.leaky_slope < 1.0)) {
    throw std::invalid_argument("leaky slope must be in [0, 1)");
  }
  ModelParams p{spec, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(spec.parameter_count())),
                seed, 0};
  std::mt19937_64 rng(seed);
  for (int l = 0; l < spec.layer_count(); ++l) {
    const double fan_in = spec.widths[static_cast<std::size_t>(l)] * 9.0;
    const bool last = l + 1 == spec.layer_count();
    const double bound = last ? std::sqrt(1.0 / fan_in) : std::sqrt(6.0 / fan_in);
    std::uniform_real_distribution<double> u(-bound, bound);
    auto w = p.weight(l);
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = u(rng);
    }
  }
  return p;
}

Eigen::Map<const Eigen::MatrixXd> ModelParams::weight(int layer) const {
  const auto l = static_cast<std::size_t>(layer);
  return {values.data() + spec.weight_offset(layer), spec.widths[l + 1], spec.widths[l] * 9};
}

Eigen::Map<const Eigen::VectorXd> ModelParams::bias(int layer) const {
  const auto l = static_cast<std::size_t>(layer);
  const auto off = spec.weight_offset(layer) +
                   static_cast<std::size_t>(spec.widths[l + 1] * spec.widths[l] * 9);
  return {values.data() + off, spec.widths[l + 1]};
}

Eigen::Map<Eigen::MatrixXd> ModelParams::weight(int layer) {
  const auto l = static_cast<std::size_t>(layer);
  return {values.data() + spec.weight_offset(layer), spec.widths[l + 1], spec.widths[l] * 9};
}

Eigen::Map<Eigen::VectorXd> ModelParams::bias(int layer) {
  const auto l = static_cast<std::size_t>(layer);
  const auto off = spec.weight_offset(layer) +
                   static_cast<std::size_t>(spec.widths[l + 1] * spec.widths[l] * 9);
  return {values.data() + off, spec.widths[l + 1]};
}

namespace {

// Feature maps are row-major (channels, I * J) with pixel index i * J + j;
// im2col row c * 9 + (ti + 1) * 3 + (tj + 1) holds channel c shifted by
// (ti, tj) * dilation.
void im2col(const FeatureMap& x, int rows, int cols, int dilation, FeatureMap& col) {
  const Eigen::Index channels = x.rows();
  col.resize(channels * 9, rows * cols);
  for (Eigen::Index c = 0; c < channels; ++c) {
    for (int ti = -1; ti <= 1; ++ti) {
      for (int tj = -1; tj <= 1; ++tj) {
        const Eigen::Index r = c * 9 + (ti + 1) * 3 + (tj + 1);
        const int di = ti * dilation;
        const int dj = tj * dilation;
        auto dst = col.row(r);
        if (std::abs(di) >= rows || std::abs(dj) >= cols) {
          dst.setZero();
          continue;
        }
        const int i0 = std::max(0, -di), i1 = std::min(rows, rows - di);
        const int j0 = std::max(0, -dj), j1 = std::min(cols, cols - dj);
        // zero only the padding, the rest is overwritten
        dst.head(i0 * cols).setZero();
        dst.tail((rows - i1) * cols).setZero();
        for (int i = i0; i < i1; ++i) {
          dst.segment(i * cols, j0).setZero();
          dst.segment(i * cols + j0, j1 - j0) = x.row(c).segment((i + di) * cols + j0 + dj, j1 - j0);
          dst.segment(i * cols + j1, cols - j1).setZero();
        }
      }
    }
  }
}

void col2im(const FeatureMap& col, Eigen::Index channels, int rows, int cols, int dilation,
            FeatureMap& x) {
  x.setZero(channels, rows * cols);
  for (Eigen::Index c = 0; c < channels; ++c) {
    for (int ti = -1; ti <= 1; ++ti) {
      for (int tj = -1; tj <= 1; ++tj) {
        const Eigen::Index r = c * 9 + (ti + 1) * 3 + (tj + 1);
        const int di = ti * dilation;
        const int dj = tj * dilation;
        if (std::abs(di) >= rows || std::abs(dj) >= cols) continue;
        const int j0 = std::max(0, -dj);
        const int j1 = std::min(cols, cols - dj);
        for (int i = std::max(0, -di); i < std::min(rows, rows - di); ++i) {
          x.row(c).segment((i + di) * cols + j0 + dj, j1 - j0) +=
              col.row(r).segment(i * cols + j0, j1 - j0);
        }
      }
    }
  }
}

FeatureMap flatten_planes(std::initializer_list<const Plane*> planes, int rows, int cols) {
  FeatureMap x(static_cast<Eigen::Index>(planes.size()), rows * cols);
  Eigen::Index c = 0;
  for (const Plane* p : planes) {
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) x(c, i * cols + j) = (*p)(i, j);
    }
    ++c;
  }
  return x;
}

}  // namespace

OutputTensor forward(const ModelParams& params, const InputTensor& input, ForwardCache* cache) {
  const ModelSpec& spec = params.spec;
  const int I = spec.rows;
  const int J = spec.cols;
  if (input.obs_re.rows() != I || input.obs_re.cols() != J || input.obs_im.rows() != I ||
      input.obs_im.cols() != J || input.mask.rows() != I || input.mask.cols() != J) {
    throw std::invalid_argument("input tensor does not match the model grid");
  }
  ForwardCache local;
  ForwardCache& ws = cache != nullptr ? *cache : local;
  const auto layers = static_cast<std::size_t>(spec.layer_count());
  ws.patches.resize(layers);
  ws.preact.resize(layers);
  ws.activations.resize(layers);

  FeatureMap x0 = flatten_planes({&input.obs_re, &input.obs_im, &input.mask}, I, J);
  const double slope = spec.leaky_slope;
  for (std::size_t l = 0; l < layers; ++l) {
    const FeatureMap& x = l == 0 ? x0 : ws.activations[l - 1];
    im2col(x, I, J, spec.dilation(static_cast<int>(l)), ws.patches[l]);
    FeatureMap& z = ws.preact[l];
    z.noalias() = params.weight(static_cast<int>(l)) * ws.patches[l];
    z.colwise() += params.bias(static_cast<int>(l));
    if (l + 1 < layers) {
      ws.activations[l] = z.cwiseMax(slope * z);  // leaky ReLU for 0 < slope < 1
    }
  }
  const FeatureMap& y = ws.preact.back();
  OutputTensor out(I, J);
  for (int c = 0; c < kOutputChannels; ++c) {
    const double s = spec.output_scale(c);
    for (int i = 0; i < I; ++i) {
      for (int j = 0; j < J; ++j) out[c](i, j) = s * y(c, i * J + j);
    }
  }
  return out;
}

double data_loss(const OutputTensor& out, const ComplexField& truth) {
  if (out.rows() != truth.rows() || out.cols() != truth.cols()) {
    throw std::invalid_argument("output and truth differ in shape");
  }
  const double n = static_cast<double>(truth.re.size());
  return ((out[kURe] - truth.re).squaredNorm() + (out[kUIm] - truth.im).squaredNorm()) / n;
}

OutputTensor data_loss_gradient(const OutputTensor& out, const ComplexField& truth) {
  const double n = static_cast<double>(truth.re.size());
  OutputTensor g(out.rows(), out.cols());
  g[kURe] = (2.0 / n) * (out[kURe] - truth.re);
  g[kUIm] = (2.0 / n) * (out[kUIm] - truth.im);
  return g;
}

LossParts total_loss(const OutputTensor& out, const ComplexField& truth, const Grid& grid,
                     const WaveContext& ctx, double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("lambda must be nonnegative");
  LossParts p;
  p.data = data_loss(out, truth);
  p.helmholtz = he_loss(out, grid, ctx.wavenumber());
  p.total = lambda == 0.0 ? p.data : p.data + lambda * p.helmholtz;
  return p;
}

Eigen::VectorXd backward_from_output(const ModelParams& params, const ForwardCache& cache,
                                     const OutputTensor& output_grad) {
  const ModelSpec& spec = params.spec;
  const int I = spec.rows;
  const int J = spec.cols;
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(params.values.size());

  FeatureMap dz(kOutputChannels, I * J);
  FeatureMap dcol, dx;
  for (int c = 0; c < kOutputChannels; ++c) {
    const double s = spec.output_scale(c);
    for (int i = 0; i < I; ++i) {
      for (int j = 0; j < J; ++j) dz(c, i * J + j) = s * output_grad[c](i, j);
    }
  }
  const double slope = spec.leaky_slope;
  for (int l = spec.layer_count() - 1; l >= 0; --l) {
    const auto lu = static_cast<std::size_t>(l);
    const FeatureMap& col = cache.patches[lu];
    const auto w_off = static_cast<Eigen::Index>(spec.weight_offset(l));
    const Eigen::Index out_ch = spec.widths[lu + 1];
    const Eigen::Index in_ch = spec.widths[lu];
    Eigen::Map<Eigen::MatrixXd>(grad.data() + w_off, out_ch, in_ch * 9).noalias() =
        dz * col.transpose();
    grad.segment(w_off + out_ch * in_ch * 9, out_ch) = dz.rowwise().sum();
    if (l == 0) break;
    dcol.noalias() = params.weight(l).transpose() * dz;
    col2im(dcol, in_ch, I, J, spec.dilation(l), dx);
    const FeatureMap& zprev = cache.preact[lu - 1];
    dz = (zprev.array() > 0.0).select(dx, slope * dx);
  }
  return grad;
}

Gradient backward(const ModelParams& params, const InputTensor& input, const ComplexField& truth,
                  double lambda, ForwardCache* workspace) {
  ForwardCache local;
  ForwardCache& cache = workspace != nullptr ? *workspace : local;
  const OutputTensor out = forward(params, input, &cache);
  const Grid grid = params.spec.grid();
  const WaveContext ctx = params.spec.context();
  Gradient g;
  g.loss = total_loss(out, truth, grid, ctx, lambda);
  OutputTensor seed = data_loss_gradient(out, truth);
  if (lambda != 0.0) {
    const OutputTensor he = he_loss_gradient(out, grid, ctx.wavenumber());
    for (int c = 0; c < kOutputChannels; ++c) seed[c] += lambda * he[c];
  }
  g.values = backward_from_output(params, cache, seed);
  return g;
}

void adam_step(Eigen::VectorXd& params, const Eigen::VectorXd& grads, AdamState& state, double lr) {
  if (params.size() != grads.size() || state.m.size() != grads.size() ||
      state.v.size() != grads.size()) {
    throw std::invalid_argument("Adam operands differ in size");
  }
  ++state.step;
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * grads;
  state.v = state.beta2 * state.v + (1.0 - state.beta2) * grads.cwiseAbs2();
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  params.array() -= lr * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + state.eps);
}

TrainResult train(const Dataset& dataset, const TrainConfig& config,
                  const std::function<void(const EpochLog&)>& on_epoch) {
  const auto train_set = dataset.train();
  if (train_set.empty()) throw std::invalid_argument("training split is empty");
  if (config.lambda < 0.0) throw std::invalid_argument("lambda must be nonnegative");
  if (!(config.learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (config.epochs < 1) throw std::invalid_argument("need at least one epoch");
  const Grid& grid = dataset.grid;
  if (config.m < 1 || config.m > grid.size()) {
    throw std::invalid_argument("observation count must be in [1, N]");
  }

  ModelSpec spec = ModelSpec::for_problem(grid, dataset.ctx);
  spec.widths = config.spec.widths;
  spec.dilations = config.spec.dilations;
  spec.leaky_slope = config.spec.leaky_slope;
  TrainResult result{ModelParams::initialize(spec, config.seed), {}};
  result.params.lambda = config.lambda;
  AdamState adam = AdamState::zeros(result.params.values.size());

  std::mt19937_64 rng(mix_seed(config.seed ^ 0x5eed5eed5eed5eedULL));
  const auto n = static_cast<int>(train_set.size());
  std::vector<std::vector<GridIndex>> fixed_indices;
  if (!config.resample_observations_each_epoch) {
    for (int s = 0; s < n; ++s) {
      std::mt19937_64 r(sample_seed(config.seed, static_cast<std::uint64_t>(s)));
      fixed_indices.push_back(sample_indices(grid, config.m, r));
    }
  }
  ForwardCache workspace;
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    for (int a = n - 1; a > 0; --a) {
      const auto b = static_cast<int>(rng() % static_cast<std::uint64_t>(a + 1));
      std::swap(order[static_cast<std::size_t>(a)], order[static_cast<std::size_t>(b)]);
    }
    EpochLog log{epoch, 0.0, 0.0, 0.0};
    for (int s : order) {
      ComplexField field = train_set[static_cast<std::size_t>(s)].field;
      if (config.phase_randomize) field = randomize_phase(field, rng);
      std::vector<GridIndex> idx = config.resample_observations_each_epoch
                                       ? sample_indices(grid, config.m, rng)
                                       : fixed_indices[static_cast<std::size_t>(s)];
      const ObservationSet obs = ObservationSet::from_field(grid, field, std::move(idx));
      const double scale = standardization_scale(obs);
      const InputTensor input = InputTensor::from_observations(grid, obs, scale);
      const Gradient g = backward(result.params, input, field.scaled(1.0 / scale), config.lambda,
                                  &workspace);
      if (!std::isfinite(g.loss.total) || !g.values.allFinite()) {
        throw TrainingDiverged("loss became non-finite at epoch " + std::to_string(epoch));
      }
      adam_step(result.params.values, g.values, adam, config.learning_rate);
      log.loss += g.loss.total;
      log.data += g.loss.data;
      log.helmholtz += g.loss.helmholtz;
    }
    log.loss /= n;
    log.data /= n;
    log.helmholtz /= n;
    result.params.epoch = epoch;
    result.log.push_back(log);
    if (on_epoch) on_epoch(log);
  }
  return result;
}

Estimate estimate(const ModelParams& params, const ObservationSet& obs) {
  const Grid grid = params.spec.grid();
  const double scale = standardization_scale(obs);
  const InputTensor input = InputTensor::from_observations(grid, obs, scale);
  OutputTensor out = forward(params, input).scaled(scale);
  return {out.pressure(), std::move(out), scale};
}

void write_checkpoint(const ModelParams& params, const std::filesystem::path& path) {
  const ModelSpec& s = params.spec;
  std::ostringstream widths;
  for (std::size_t l = 0; l < s.widths.size(); ++l) widths << (l ? "," : "") << s.widths[l];
  Manifest m;
  m.set("layers", widths.str());
  std::ostringstream dil;
  for (int l = 0; l < s.layer_count(); ++l) dil << (l ? "," : "") << s.dilation(l);
  m.set("kernel", "3x3");
  m.set("dilations", dil.str());
  m.set("leaky_slope", format_double(s.leaky_slope));
  m.set("derivative_scale", format_double(s.derivative_scale));
  m.set("rows", std::to_string(s.rows));
  m.set("cols", std::to_string(s.cols));
  m.set("spacing_m", format_double(s.spacing));
  m.set("frequency_hz", format_double(s.frequency));
  m.set("sound_speed_mps", format_double(s.sound_speed));
  m.set("seed", std::to_string(params.seed));
  m.set("epoch", std::to_string(params.epoch));
  m.set("lambda", format_double(params.lambda));
  m.set("n_params", std::to_string(params.values.size()));
  std::vector<unsigned char> payload;
  payload.reserve(static_cast<std::size_t>(params.values.size()) * 8);
  for (Eigen::Index a = 0; a < params.values.size(); ++a) append_f64(payload, params.values(a));
  write_manifest_file(path, "SFMODEL 1", m, payload);
}

ModelParams read_checkpoint(const std::filesystem::path& path) {
  std::vector<unsigned char> payload;
  const Manifest m = read_manifest_file(path, "SFMODEL 1", payload);
  ModelSpec s;
  s.widths.clear();
  std::istringstream ws(m.get("layers"));
  for (std::string tok; std::getline(ws, tok, ',');) {
    s.widths.push_back(static_cast<int>(parse_int(tok, "layers")));
  }
  if (m.get("kernel") != "3x3") throw DatasetError("unsupported kernel size");
  s.dilations.clear();
  std::istringstream ds(m.get("dilations"));
  for (std::string tok; std::getline(ds, tok, ',');) {
    s.dilations.push_back(static_cast<int>(parse_int(tok, "dilations")));
  }
  if (static_cast<int>(s.dilations.size()) != s.layer_count()) {
    throw DatasetError("malformed header: dilation count does not match the layers");
  }
  s.leaky_slope = parse_double(m.get("leaky_slope"), "leaky_slope");
  s.derivative_scale = parse_double(m.get("derivative_scale"), "derivative_scale");
  s.rows = static_cast<int>(parse_int(m.get("rows"), "rows"));
  s.cols = static_cast<int>(parse_int(m.get("cols"), "cols"));
  s.spacing = parse_double(m.get("spacing_m"), "spacing_m");
  s.frequency = parse_double(m.get("frequency_hz"), "frequency_hz");
  s.sound_speed = parse_double(m.get("sound_speed_mps"), "sound_speed_mps");
  const auto n = parse_u64(m.get("n_params"), "n_params");
  if (n != s.parameter_count() || payload.size() != n * 8) {
    throw DatasetError("count mismatch: parameter block does not match the layer spec");
  }
  ModelParams p{s, Eigen::VectorXd(static_cast<Eigen::Index>(n)),
                parse_u64(m.get("seed"), "seed"),
                static_cast<int>(parse_int(m.get("epoch"), "epoch"))};
  if (m.has("lambda")) p.lambda = parse_double(m.get("lambda"), "lambda");
  std::size_t off = 0;
  for (Eigen::Index a = 0; a < p.values.size(); ++a) p.values(a) = read_f64(payload, off);
  return p;
}

void write_loss_log_csv(std::ostream& os, const std::vector<EpochLog>& log) {
  os << "epoch,L,L_D,L_H\n" << std::setprecision(17);
  for (const auto& e : log) {
    os << e.epoch << ',' << e.loss << ',' << e.data << ',' << e.helmholtz << '\n';
  }
}

}  // namespace sfr
