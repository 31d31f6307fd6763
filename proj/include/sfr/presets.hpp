#pragma once

// Named run configurations. "paper" is the full-size setup on a
// 32 x 32 grid; "desk" is a 16 x 16 problem sized for a single CPU core.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sfr {

struct RunPreset {
  std::string name;
  int grid = 32;
  double spacing = 0.1;
  double frequency = 300.0;
  double sound_speed = 340.0;
  int n_samples = 256;
  int epochs = 5000;
  double learning_rate = 0.01;
  double lambda = 1e-5;
  std::vector<int> m_values{5, 10, 15, 20};
  int repetitions = 5;
  std::uint64_t seed = 7;
};

inline RunPreset paper_preset() { return {.name = "paper"}; }

inline RunPreset desk_preset() {
  RunPreset p;
  p.name = "desk";
  p.grid = 16;
  p.spacing = 0.2;  // 3 m region, close to the 3.1 m of the paper preset
  p.n_samples = 128;
  p.epochs = 500;
  p.learning_rate = 1e-3;
  p.lambda = 1e-4;
  p.repetitions = 3;
  return p;
}

inline RunPreset preset_by_name(const std::string& name) {
  if (name == "paper") return paper_preset();
  if (name == "desk") return desk_preset();
  throw std::invalid_argument("unknown preset: " + name + " (expected paper or desk)");
}

}  // namespace sfr
