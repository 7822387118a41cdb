#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "olrg/engine.hpp"

namespace olrg::train {

enum class GradMethod { adjoint, finite_diff };
enum class MapMode { omm, hem };

struct TrainConfig {
  MapMode mode = MapMode::omm;
  // loss
  int order = 2;
  int tobc_batch = 24;
  int checkpoints = 20;
  double total_time = 1.0;
  // system
  double h = 1.0;
  int start_n = 2;
  int target_n = 4;
  int grow_l = 1;
  // optimization
  int epochs = 100;
  double learning_rate = 1e-3;
  std::uint64_t seed = 1;
  int moving_avg_window = 10;
  GradMethod grad_method = GradMethod::adjoint;
  double fd_eps = 1e-5;
  int snapshot_interval = 0;  // 0 = no periodic snapshots
  // map hyperparameters
  int depth = 8;
  int width = 0;  // 0 = input width (OMM); pulse-net width for HEM
  int noise_dim = 8;
  int ensemble_size = 10;
  int substeps = 4;
  bool identity_embedding = false;
  // transfer learning
  std::vector<double> transfer_times;
  int epochs_per_point = 0;

  void validate() const;  // throws std::invalid_argument naming the field
};

struct EpochRecord {
  int epoch = 0;
  double total_loss = 0.0;
  std::vector<double> per_step;
  double wall_ms = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  int best_epoch = -1;
  std::vector<double> best_params;
  std::vector<double> final_params;
  std::vector<std::pair<int, std::vector<double>>> snapshots;
  bool diverged = false;
};

/// Objective with an optional structured reverse-mode path. `value` must be
/// deterministic for fixed parameters (common random numbers), which makes
/// central differences meaningful.
struct LossFunction {
  std::function<double(const std::vector<double>&)> value;
  std::function<double(const std::vector<double>&, std::vector<double>&)>
      value_and_grad;
};

std::vector<double> grad(const LossFunction& loss,
                         const std::vector<double>& params, GradMethod method,
                         double fd_eps = 1e-5);

struct AdamState {
  std::vector<double> m, v;
  long t = 0;
};

void adam_step(std::vector<double>& params, const std::vector<double>& g,
               AdamState& state, double lr, double beta1 = 0.9,
               double beta2 = 0.999, double eps = 1e-8);

/// Index of the epoch minimizing the trailing moving average of the total
/// loss; ties break toward the earliest epoch.
int select_best_epoch(const std::vector<double>& totals, int window = 10);

engine::Setup make_setup(const TrainConfig& cfg);

TrainHistory train(const TrainConfig& cfg,
                   const std::vector<double>* warm_start = nullptr);

/// <Z1 Z2>(T) predicted by the fully grown chain at the given parameters.
double predict(const TrainConfig& cfg, const std::vector<double>& theta);

/// Trains at each time point in ascending order, warm-starting every leg from
/// the previous leg's best-epoch parameters. epochs_per_point == 0 legs are
/// pass-throughs that just carry the warm start forward.
std::vector<TrainHistory> transfer_schedule(const TrainConfig& cfg,
                                            const std::vector<double>& times,
                                            int epochs_per_point);

}  // namespace olrg::train
