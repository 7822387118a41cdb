#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "olrg/model.hpp"
#include "olrg/nn.hpp"

namespace olrg::hem {

/// Three small networks parameterizing the device controls: Omega(t) and
/// Delta(t) take the (rescaled) clock, the third maps a nearest-neighbour
/// pair index to its interaction strength. One parameter set is shared by
/// devices of every size. The clock rescale t_scale = exp(raw) is learnable.
struct PulseParams {
  nn::Shape omega_net, delta_net, v_net;
  nn::Layout omega_layout, delta_layout, v_layout;
  int t_scale_offset = 0;
  std::vector<double> theta;

  static PulseParams create(int depth, int width, std::uint64_t seed);

  int param_count() const { return static_cast<int>(theta.size()); }
  double t_scale() const;
  double omega(double t) const;       // evaluated at device time t_scale * t
  double delta(double t) const;
  double v_pair(int pair_index) const;  // 1-based bond index
};

/// Structure operators of the 2-level chain, cached per size:
/// sum_i n_i n_{i+1} bond projectors, sum_i X_i and sum_i n_i with
/// n = (I - Z)/2.
struct DeviceBasis {
  std::vector<Matrix> bonds;
  Matrix sum_x;
  Matrix sum_n;
  static std::shared_ptr<const DeviceBasis> make(int n_sites);
};

struct DeviceHamiltonian {
  int n_sites = 0;
  PulseParams pulses;
  std::shared_ptr<const DeviceBasis> basis;

  static DeviceHamiltonian create(int n_sites, PulseParams pulses);
};

/// sum_<ij> V_ij n_i n_j + Omega(t) sum_i X_i - Delta(t) sum_i n_i.
Matrix rydberg_hamiltonian(const DeviceHamiltonian& dev, double t);

/// Swaps the set's Hamiltonian expression for the device Hamiltonian; all
/// other members are untouched. Result is flagged virtual and time-dependent.
model::RelevantSet hem_apply(const model::RelevantSet& set,
                             const DeviceHamiltonian& dev);

/// Grows a time-dependent device Hamiltonian of `dev_sites` sites by l sites:
/// device dynamics on the block, problem-model coupling and fields on the new
/// sites.
model::TimeDependentH grow_device(const model::TimeDependentH& dev_h,
                                  int dev_sites, const model::ModelSpec& spec,
                                  int l);

/// Average analog evolution time needed for one order-k correlator:
/// c_theta * boundary_norm * (2 + (k-1)(1+M)/M) * T.
double pulse_duration_estimate(int k, int checkpoints, double total_time,
                               double boundary_norm, double c_theta);

/// Measurement budget for a gradient step on hardware:
/// batch * growing_steps * shots_per_expectation * n_params * 2^{k+1}.
double shot_count_estimate(int batch, int growing_steps,
                           double shots_per_expectation, int n_params,
                           int order);

/// CSV of the programmed controls on a uniform grid over [0, t_max]:
/// columns t, omega, delta, v1..v_{n-1} (the couplings are constant in time).
std::string pulse_schedule_csv(const PulseParams& pulses, int n_sites,
                               double t_max, int samples);

}  // namespace olrg::hem
