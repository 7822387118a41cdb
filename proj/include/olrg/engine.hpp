#pragma once

#include <cstdint>

#include "olrg/hem.hpp"
#include "olrg/omm.hpp"
#include "olrg/tape.hpp"
#include "olrg/tobc.hpp"

namespace olrg::engine {

enum class MapOverride {
  none,
  identity_embedding,  // pin the pre-QR matrix to the square identity
};

struct Setup {
  model::ModelSpec spec;
  int start_n = 2;
  int target_n = 4;
  int grow_l = 1;
  double total_time = 1.0;
  int checkpoints = 20;
  int order = 2;
  int batch = 24;
  int substeps = 4;  // Magnus substeps per checkpoint interval
  MapOverride map_override = MapOverride::none;

  int steps() const { return (target_n - start_n) / grow_l; }
};

struct EpochLoss {
  ad::Tape::Id total = -1;
  double total_value = 0.0;
  std::vector<double> per_step;
  long sample_count = 0;
};

/// Differentiable loss for the compress-then-grow chain with the
/// noise-conditioned isometry map. The epoch seed fixes the sampled indices
/// and noise draws, so rebuilding with the same seed reproduces the loss
/// exactly (common random numbers for finite differences).
class OmmProblem {
 public:
  OmmProblem(Setup setup, omm::OMMParams prototype);

  const Setup& setup() const { return setup_; }
  const omm::OMMParams& prototype() const { return proto_; }
  int param_count() const { return static_cast<int>(proto_.theta.size()); }

  /// The tape must be bound to the parameter vector being differentiated.
  EpochLoss build_loss(ad::Tape& tape, std::uint64_t epoch_seed) const;

  /// Ensemble-averaged <O(T)> of the fully grown chain, evaluated with the
  /// reference solvers (no tape).
  double predict(const std::vector<double>& theta, std::uint64_t noise_seed,
                 const dynamics::SolverConfig& cfg) const;

 private:
  Setup setup_;
  omm::OMMParams proto_;
};

/// Differentiable loss for the pulse-programmed device chain.
class HemProblem {
 public:
  HemProblem(Setup setup, hem::PulseParams prototype);

  const Setup& setup() const { return setup_; }
  const hem::PulseParams& prototype() const { return proto_; }
  int param_count() const { return proto_.param_count(); }

  EpochLoss build_loss(ad::Tape& tape, std::uint64_t epoch_seed) const;

  double predict(const std::vector<double>& theta,
                 const dynamics::SolverConfig& cfg) const;

 private:
  Setup setup_;
  hem::PulseParams proto_;
};

}  // namespace olrg::engine
