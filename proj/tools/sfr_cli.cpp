// sfr: simulate datasets, train the estimators, evaluate them against kernel
// interpolation and write figure artifacts.

#include "sfr/dataset.hpp"
#include "sfr/evaluation.hpp"
#include "sfr/kernel_baseline.hpp"
#include "sfr/metrics.hpp"
#include "sfr/model.hpp"
#include "sfr/plot.hpp"
#include "sfr/presets.hpp"
#include "sfr/simulator.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace sfr;

namespace {

// Effective settings: preset, then config file, then flags.
struct Settings {
  RunPreset run = desk_preset();
  std::string generator = "point";
  int n_waves = 5;
  double reg = kDefaultKernelRegularization;
};

struct Flags {
  std::optional<std::string> preset;
  std::optional<std::string> config;
  std::optional<int> grid;
  std::optional<double> spacing;
  std::optional<double> freq;
  std::optional<double> sound_speed;
  std::optional<std::uint64_t> seed;
  std::optional<int> n;
  std::optional<int> epochs;
  std::optional<double> lr;
  std::optional<double> lambda;
  std::optional<std::string> m;
  std::optional<int> runs;
  std::optional<std::string> generator;
  std::optional<int> waves;
  std::optional<double> reg;
  std::string out;
};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> v;
  std::istringstream is(text);
  for (std::string tok; std::getline(is, tok, ',');) {
    tok = trim(tok);
    if (tok.empty()) continue;
    v.push_back(static_cast<int>(parse_int(tok, "m")));
  }
  if (v.empty()) throw std::invalid_argument("empty list of observation counts");
  return v;
}

std::map<std::string, std::string> read_config(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file: " + path.string());
  std::map<std::string, std::string> kv;
  int lineno = 0;
  for (std::string line; std::getline(is, line);) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) {
      throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) +
                                  ": expected 'key: value'");
    }
    std::string key = trim(line.substr(0, colon));
    std::replace(key.begin(), key.end(), '-', '_');
    kv[key] = trim(line.substr(colon + 1));
  }
  return kv;
}

void apply(Settings& s, const std::string& key, const std::string& v) {
  if (key == "preset") return;
  if (key == "grid") s.run.grid = static_cast<int>(parse_int(v, key));
  else if (key == "spacing") s.run.spacing = parse_double(v, key);
  else if (key == "freq") s.run.frequency = parse_double(v, key);
  else if (key == "sound_speed") s.run.sound_speed = parse_double(v, key);
  else if (key == "seed") s.run.seed = parse_u64(v, key);
  else if (key == "n") s.run.n_samples = static_cast<int>(parse_int(v, key));
  else if (key == "epochs") s.run.epochs = static_cast<int>(parse_int(v, key));
  else if (key == "lr") s.run.learning_rate = parse_double(v, key);
  else if (key == "lambda") s.run.lambda = parse_double(v, key);
  else if (key == "m") s.run.m_values = parse_int_list(v);
  else if (key == "runs") s.run.repetitions = static_cast<int>(parse_int(v, key));
  else if (key == "generator") s.generator = v;
  else if (key == "waves") s.n_waves = static_cast<int>(parse_int(v, key));
  else if (key == "reg") s.reg = parse_double(v, key);
  else throw std::invalid_argument("unknown config key: " + key);
}

Settings resolve(const Flags& f) {
  std::map<std::string, std::string> cfg;
  if (f.config) cfg = read_config(*f.config);
  std::string preset = "desk";
  if (cfg.count("preset")) preset = cfg.at("preset");
  if (f.preset) preset = *f.preset;
  Settings s;
  s.run = preset_by_name(preset);
  for (const auto& [k, v] : cfg) apply(s, k, v);
  if (f.grid) s.run.grid = *f.grid;
  if (f.spacing) s.run.spacing = *f.spacing;
  if (f.freq) s.run.frequency = *f.freq;
  if (f.sound_speed) s.run.sound_speed = *f.sound_speed;
  if (f.seed) s.run.seed = *f.seed;
  if (f.n) s.run.n_samples = *f.n;
  if (f.epochs) s.run.epochs = *f.epochs;
  if (f.lr) s.run.learning_rate = *f.lr;
  if (f.lambda) s.run.lambda = *f.lambda;
  if (f.m) s.run.m_values = parse_int_list(*f.m);
  if (f.runs) s.run.repetitions = *f.runs;
  if (f.generator) s.generator = *f.generator;
  if (f.waves) s.n_waves = *f.waves;
  if (f.reg) s.reg = *f.reg;
  return s;
}

// Geometry flags given together with an existing dataset must agree with it.
void check_geometry_flags(const Flags& f, const Dataset& ds) {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("dataset " + what + " differs from the command line");
  };
  if (f.grid && (ds.grid.rows() != *f.grid || ds.grid.cols() != *f.grid)) fail("grid");
  if (f.spacing && ds.grid.spacing() != *f.spacing) fail("spacing");
  if (f.freq && ds.ctx.frequency() != *f.freq) fail("frequency");
  if (f.sound_speed && ds.ctx.sound_speed() != *f.sound_speed) fail("sound speed");
}

void add_common(CLI::App* app, Flags& f, bool out_required = true) {
  app->add_option("--preset", f.preset, "built-in defaults: desk or paper")
      ->check(CLI::IsMember({"desk", "paper"}));
  app->add_option("--config", f.config, "key: value file; flags override it")
      ->check(CLI::ExistingFile);
  app->add_option("--grid", f.grid, "nodes per axis (I = J)")->check(CLI::Range(2, 4096));
  app->add_option("--spacing", f.spacing, "node spacing l in meters")
      ->check(CLI::PositiveNumber);
  app->add_option("--freq", f.freq, "frequency in Hz")->check(CLI::PositiveNumber);
  app->add_option("--sound-speed", f.sound_speed, "speed of sound in m/s")
      ->check(CLI::PositiveNumber);
  app->add_option("--seed", f.seed, "random seed");
  auto* out = app->add_option("--out", f.out, "output path");
  if (out_required) out->required();
}

// Model arguments of the form NAME=PATH; PATH may contain {m} and {run}.
struct ModelArg {
  std::string name;
  std::string pattern;
};

std::vector<ModelArg> parse_models(const std::vector<std::string>& args) {
  std::vector<ModelArg> v;
  for (const auto& a : args) {
    const auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == a.size()) {
      throw std::invalid_argument("--model expects NAME=PATH, got '" + a + "'");
    }
    v.push_back({a.substr(0, eq), a.substr(eq + 1)});
  }
  return v;
}

std::string expand(std::string pattern, int m, int run) {
  for (auto [key, value] : {std::pair{std::string("{m}"), std::to_string(m)},
                            std::pair{std::string("{run}"), std::to_string(run)}}) {
    for (auto pos = pattern.find(key); pos != std::string::npos; pos = pattern.find(key)) {
      pattern.replace(pos, key.size(), value);
    }
  }
  return pattern;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open for writing: " + path.string());
  os << text;
  os.close();
  if (!os || fs::file_size(path) != text.size()) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

// --- simulate --------------------------------------------------------------

int cmd_simulate(const Flags& f) {
  const Settings s = resolve(f);
  const Grid grid(s.run.grid, s.run.grid, s.run.spacing);
  const WaveContext ctx(s.run.frequency, s.run.sound_speed);
  GeneratorConfig cfg;
  if (s.generator == "point") {
    cfg.kind = SourceKind::kPointSource;
  } else if (s.generator == "planewave") {
    cfg.kind = SourceKind::kPlaneWaveMix;
  } else {
    throw std::invalid_argument("unknown generator '" + s.generator + "' (point or planewave)");
  }
  cfg.n_waves = s.n_waves;
  const Dataset ds = generate_dataset(grid, ctx, s.run.n_samples, cfg, s.run.seed);
  ensure_parent(f.out);
  write_dataset(ds, f.out);
  const Dataset check = read_dataset(f.out);
  if (check.samples.size() != ds.samples.size()) throw std::runtime_error("validation failed");
  std::cout << "wrote " << ds.samples.size() << " samples (" << ds.train().size() << " train, "
            << ds.test().size() << " test) of " << to_string(cfg.kind) << " fields on a "
            << grid.rows() << "x" << grid.cols() << " grid, l = " << grid.spacing()
            << " m, f = " << ctx.frequency() << " Hz, k = " << ctx.wavenumber() << " 1/m, seed "
            << s.run.seed << " -> " << f.out << "\n";
  return 0;
}

// --- train -----------------------------------------------------------------

int cmd_train(const Flags& f, const std::string& data, const std::string& log_path,
              bool fixed_obs, int progress) {
  const Settings s = resolve(f);
  const Dataset ds = read_dataset(data);
  check_geometry_flags(f, ds);
  if (s.run.m_values.size() != 1) {
    throw std::invalid_argument("train needs a single observation count (--m)");
  }
  TrainConfig cfg;
  cfg.lambda = s.run.lambda;
  cfg.learning_rate = s.run.learning_rate;
  cfg.epochs = s.run.epochs;
  cfg.m = s.run.m_values.front();
  cfg.seed = s.run.seed;
  cfg.resample_observations_each_epoch = !fixed_obs;

  const auto t0 = std::chrono::steady_clock::now();
  const TrainResult r = train(ds, cfg, [&](const EpochLog& e) {
    if (progress > 0 && (e.epoch % progress == 0 || e.epoch == 1 || e.epoch == cfg.epochs)) {
      std::cerr << "epoch " << e.epoch << "  L " << e.loss << "  L_D " << e.data << "  L_H "
                << e.helmholtz << "\n";
    }
  });
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  ensure_parent(f.out);
  write_checkpoint(r.params, f.out);
  const ModelParams check = read_checkpoint(f.out);
  if (check.values != r.params.values) throw std::runtime_error("checkpoint validation failed");
  const fs::path log = log_path.empty() ? fs::path(f.out + ".loss.csv") : fs::path(log_path);
  std::ostringstream os;
  write_loss_log_csv(os, r.log);
  write_text(log, os.str());

  const auto& last = r.log.back();
  std::cout << (cfg.lambda > 0.0 ? "proposed" : "baseline") << " model, M = " << cfg.m
            << ", lambda = " << cfg.lambda << ", " << cfg.epochs << " epochs in " << std::fixed
            << std::setprecision(1) << secs << " s" << std::defaultfloat << std::setprecision(6)
            << "; final L = " << last.loss << ", L_D = " << last.data << ", L_H = " << last.helmholtz
            << "\ncheckpoint -> " << f.out << "\nloss log   -> " << log.string() << "\n";
  return 0;
}

// --- eval / kernel ---------------------------------------------------------

void print_table(const ResultTable& t) {
  std::cout << std::setw(4) << "M";
  for (const auto& m : t.methods) std::cout << "  " << std::setw(22) << (m + " NMSE[dB]");
  for (const auto& m : t.methods) std::cout << "  " << std::setw(22) << (m + " log10 HE");
  std::cout << "\n" << std::fixed << std::setprecision(2);
  for (const auto& [m, row] : t.nmse) {
    std::cout << std::setw(4) << m;
    for (const auto& method : t.methods) {
      std::ostringstream cell;
      cell << std::fixed << std::setprecision(2) << row.at(method).mean << " +- " << row.at(method).std;
      std::cout << "  " << std::setw(22) << cell.str();
    }
    for (const auto& method : t.methods) {
      const auto& c = t.he.at(m).at(method);
      std::ostringstream cell;
      cell << std::fixed << std::setprecision(2) << c.mean << " +- " << c.std;
      std::cout << "  " << std::setw(22) << cell.str();
    }
    std::cout << "\n";
  }
  std::cout << std::defaultfloat;
}

int cmd_eval(const Flags& f, const std::string& data, const std::vector<std::string>& model_args,
             bool with_kernel) {
  const Settings s = resolve(f);
  const Dataset ds = read_dataset(data);
  check_geometry_flags(f, ds);
  const auto models = parse_models(model_args);
  if (models.empty() && !with_kernel) {
    throw std::invalid_argument("nothing to evaluate: give --model NAME=PATH and/or --kernel");
  }
  std::vector<MetricRecord> records;
  for (int m : s.run.m_values) {
    for (int run = 0; run < s.run.repetitions; ++run) {
      if (with_kernel) {
        const auto k = evaluate_kernel(ds, m, run, s.run.seed, s.reg);
        records.insert(records.end(), k.begin(), k.end());
      }
      for (const auto& model : models) {
        const ModelParams params = read_checkpoint(expand(model.pattern, m, run));
        const auto r = evaluate_model(ds, params, model.name, m, run, s.run.seed);
        records.insert(records.end(), r.begin(), r.end());
      }
    }
  }
  const ResultTable table = ResultTable::from_records(records);
  std::ostringstream rec, tab;
  write_records_csv(rec, records);
  write_table_csv(tab, table);
  const std::string prefix = f.out;
  write_text(prefix + "_records.csv", rec.str());
  write_text(prefix + "_table.csv", tab.str());
  print_table(table);
  std::cout << "records -> " << prefix << "_records.csv\ntable   -> " << prefix << "_table.csv\n";
  return 0;
}

// --- plot ------------------------------------------------------------------

int cmd_plot(const Flags& f, const std::string& data, const std::vector<std::string>& model_args,
             int sample, int run) {
  const Settings s = resolve(f);
  const Dataset ds = read_dataset(data);
  check_geometry_flags(f, ds);
  if (s.run.m_values.size() != 1) throw std::invalid_argument("plot needs a single --m");
  const int m = s.run.m_values.front();
  const ObservationSet obs = evaluation_observations(ds, m, run, sample, s.run.seed);
  const ComplexField& truth = ds.test()[static_cast<std::size_t>(sample)].field;
  const double vmax = truth.re.cwiseAbs().maxCoeff();
  const fs::path dir = f.out;
  fs::create_directories(dir);

  std::vector<std::pair<std::string, Plane>> images{{"truth", truth.re}};
  const auto est = KernelEstimator::fit(obs, ds.grid, ds.ctx, s.reg);
  images.emplace_back("kernel", est.predict(ds.grid).re);
  for (const auto& model : parse_models(model_args)) {
    const ModelParams params = read_checkpoint(expand(model.pattern, m, run));
    check_compatible(params, ds);
    images.emplace_back(model.name, estimate(params, obs).field.re);
  }
  for (const auto& [name, plane] : images) {
    write_pgm(dir / (name + "_re.pgm"), plane, vmax, &obs.mask());
    write_csv_grid(dir / (name + "_re.csv"), plane);
    std::ifstream is(dir / (name + "_re.csv"));
    if (read_csv_grid(is) != plane) throw std::runtime_error("CSV validation failed for " + name);
    std::cout << name << ": " << (dir / (name + "_re.pgm")).string() << ", "
              << (dir / (name + "_re.csv")).string();
    std::cout << "\n";
  }
  std::ostringstream pts;
  pts << "i,j,x,y\n";
  for (const auto& idx : obs.indices()) {
    pts << idx.i << ',' << idx.j << ',' << format_double(ds.grid.x(idx.i)) << ','
        << format_double(ds.grid.y(idx.j)) << '\n';
  }
  write_text(dir / "observations.csv", pts.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sound field reconstruction from sparse microphones with a Helmholtz-penalized CNN"};
  app.require_subcommand(1);

  Flags f;
  std::string data, log_path;
  std::vector<std::string> models;
  bool fixed_obs = false, with_kernel = false;
  int progress = 50, sample = 0, run = 0;

  auto* sim = app.add_subcommand("simulate", "generate a train/test dataset of exact Helmholtz fields");
  add_common(sim, f);
  sim->add_option("--n", f.n, "number of samples (even: half train, half test)");
  sim->add_option("--generator", f.generator, "point (free-field point sources) or planewave");
  sim->add_option("--waves", f.waves, "plane waves per sample for --generator planewave");

  auto* tr = app.add_subcommand("train", "train the CNN estimator (lambda = 0: baseline)");
  add_common(tr, f);
  tr->add_option("--data", data, "dataset file")->required();
  tr->add_option("--m", f.m, "observations per sample");
  tr->add_option("--lambda", f.lambda, "weight of the Helmholtz loss")->check(CLI::NonNegativeNumber);
  tr->add_option("--epochs", f.epochs, "training epochs")->check(CLI::PositiveNumber);
  tr->add_option("--lr", f.lr, "Adam learning rate")->check(CLI::PositiveNumber);
  tr->add_option("--log", log_path, "loss log CSV (default: <out>.loss.csv)");
  tr->add_flag("--fixed-observations", fixed_obs, "keep one observation set per sample");
  tr->add_option("--progress", progress, "print losses every N epochs (0: quiet)");

  auto* ev = app.add_subcommand("eval", "score checkpoints (and kernel interpolation) on the test split");
  add_common(ev, f);
  ev->add_option("--data", data, "dataset file")->required();
  ev->add_option("--model", models, "NAME=PATH; PATH may use {m} and {run}");
  ev->add_flag("--kernel", with_kernel, "include kernel interpolation");
  ev->add_option("--m", f.m, "comma-separated observation counts");
  ev->add_option("--runs", f.runs, "repetitions per M")->check(CLI::PositiveNumber);
  ev->add_option("--reg", f.reg, "kernel regularization")->check(CLI::PositiveNumber);

  auto* ke = app.add_subcommand("kernel", "score kernel interpolation alone");
  add_common(ke, f);
  ke->add_option("--data", data, "dataset file")->required();
  ke->add_option("--m", f.m, "comma-separated observation counts");
  ke->add_option("--runs", f.runs, "repetitions per M")->check(CLI::PositiveNumber);
  ke->add_option("--reg", f.reg, "kernel regularization")->check(CLI::PositiveNumber);

  auto* pl = app.add_subcommand("plot", "write PGM heatmaps and CSV grids of Re(u) for one test sample");
  add_common(pl, f);
  pl->add_option("--data", data, "dataset file")->required();
  pl->add_option("--model", models, "NAME=PATH; PATH may use {m} and {run}");
  pl->add_option("--m", f.m, "observation count");
  pl->add_option("--sample", sample, "test-sample index")->check(CLI::NonNegativeNumber);
  pl->add_option("--run", run, "repetition index selecting the observation set")
      ->check(CLI::NonNegativeNumber);
  pl->add_option("--reg", f.reg, "kernel regularization")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\nRun with --help for more information.\n";
    return 1;
  }

  try {
    if (*sim) return cmd_simulate(f);
    if (*tr) return cmd_train(f, data, log_path, fixed_obs, progress);
    if (*ev) return cmd_eval(f, data, models, with_kernel);
    if (*ke) return cmd_eval(f, data, {}, true);
    if (*pl) {
      if (!f.m) f.m = "10";
      return cmd_plot(f, data, models, sample, run);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
