#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "olrg/train.hpp"

namespace olrg::cli {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parsed experiment description. The on-disk format is a small TOML subset:
/// [section] headers, key = value with integers, floats, booleans, quoted
/// strings and flat numeric arrays. Unknown keys are rejected.
struct ExperimentConfig {
  int schema = 1;
  // [model]
  double h = 1.0;
  int start_n = 2;
  int target_n = 4;
  int grow_l = 1;
  int obs_a = 1;
  int obs_b = 2;
  // [loss]
  int order = 2;
  int tobc_batch = 24;
  int checkpoints = 20;
  double total_time = 1.0;
  std::vector<double> times;  // non-empty => transfer schedule
  // [map]
  std::string mode = "omm";
  int depth = 8;
  int width = 0;
  int noise_dim = 8;
  int ensemble_size = 10;
  bool identity_embedding = false;
  // [train]
  int epochs = 100;
  double learning_rate = 1e-3;
  std::uint64_t seed = 1;
  int window = 10;
  std::string grad = "adjoint";
  double fd_eps = 1e-5;
  int epochs_per_point = 0;
  int snapshot_interval = 0;
  int substeps = 4;
  // [output]
  std::string output_dir = "results";

  train::TrainConfig to_train_config() const;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

}  // namespace olrg::cli
