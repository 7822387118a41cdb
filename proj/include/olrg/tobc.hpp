#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "olrg/dynamics.hpp"
#include "olrg/model.hpp"

namespace olrg::tobc {

/// One sampled correlator multi-index: k boundary choices, k checkpoint times
/// (kept in sampled order, deliberately unsorted) and k signs. Order 0 is the
/// empty index, i.e. the plain observable expectation.
struct TOBCIndex {
  int order = 0;
  std::vector<int> boundary_ids;  // 0-based into RelevantSet::boundary
  std::vector<double> times;      // members of the checkpoint grid
  std::vector<int> signs;         // +1 anti-commutator, -1 commutator
};

struct LossReport {
  std::vector<double> per_step;
  double total = 0.0;
  long sample_count = 0;
};

/// Uniform, seed-deterministic batch at a single order.
std::vector<TOBCIndex> sample_indices(std::uint64_t seed, int order, int batch,
                                      const dynamics::Checkpoints& grid,
                                      int n_boundary);

/// Splits `batch` evenly across orders 0..order_cutoff, remainder assigned to
/// the lower orders.
std::vector<TOBCIndex> sample_mixed_orders(std::uint64_t seed, int order_cutoff,
                                           int batch,
                                           const dynamics::Checkpoints& grid,
                                           int n_boundary);

/// tr(rho . ad_{B_{i1}(t1),s1} ... ad_{B_{ik}(tk),sk}[O(T)]), adjoints applied
/// in stored order with the last-listed index innermost.
Complex eval_tobc(const model::RelevantSet& set, const TOBCIndex& idx, double T,
                  const dynamics::SolverConfig& cfg);

/// Precomputes O(T) and every boundary operator at every grid time for one
/// set, so a batch of correlators costs k matrix products each.
class Evaluator {
 public:
  Evaluator(const model::RelevantSet& set, const dynamics::Checkpoints& grid,
            const dynamics::SolverConfig& cfg);

  Complex eval(const TOBCIndex& idx) const;
  Complex expectation() const;  // tr(rho O(T))

 private:
  int time_slot(double t) const;

  Matrix rho_;
  Matrix obs_t_;
  std::vector<std::vector<Matrix>> boundary_t_;  // [boundary][checkpoint]
  dynamics::Checkpoints grid_;
};

/// (1/b) sum_i | chi_i(real) - chi_i(virtual) | at the grid implied by the
/// index times' common grid; both sets must expose the same boundary count.
double loss_step(const model::RelevantSet& real_set,
                 const model::RelevantSet& virtual_set,
                 std::span<const TOBCIndex> indices, double T,
                 const dynamics::SolverConfig& cfg);

struct SamplerSettings {
  std::uint64_t seed = 0;
  int order_cutoff = 0;
  int batch = 1;
  int checkpoints = 20;
};

/// Per-step losses over a chain of (real, virtual) pairs with independent
/// index samples per step, plus their sum.
LossReport total_loss(
    std::span<const std::pair<model::RelevantSet, model::RelevantSet>> chain,
    const SamplerSettings& sampler, double T,
    const dynamics::SolverConfig& cfg);

}  // namespace olrg::tobc
