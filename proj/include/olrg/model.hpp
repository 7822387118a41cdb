#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "olrg/qops.hpp"

namespace olrg::model {

/// Open-boundary transverse-field Ising chain, sites added on the right.
struct ModelSpec {
  double h = 1.0;
  int locality_w = 2;
  // One connecting species for the TFIM: Z on the last system site paired
  // with Z on the first environment site.
  std::vector<std::pair<char, char>> connecting_pairs{{'Z', 'Z'}};
};

using TimeDependentH = std::function<Matrix(double)>;

/// The operators needed to evaluate the target property at the current scale:
/// initial state, Hamiltonian, saturated boundary operators and the
/// observable. `n_sites` is the represented (virtual) site count; the working
/// matrix dimension can be smaller after compression.
///
/// When `hamiltonian_t` is set the set evolves under a time-dependent
/// Hamiltonian and the static `hamiltonian` member is left empty.
struct RelevantSet {
  int n_sites = 0;
  qops::DenseOperator rho;
  qops::DenseOperator hamiltonian;
  qops::DenseOperator observable;
  std::vector<qops::DenseOperator> boundary;
  bool is_virtual = false;
  TimeDependentH hamiltonian_t;

  Eigen::Index dim() const { return rho.dim(); }
  bool time_dependent() const { return static_cast<bool>(hamiltonian_t); }
};

/// H_n = sum_i Z_i Z_{i+1} + h sum_i X_i on n sites; n = 1 is the pure field
/// term h*X.
qops::DenseOperator tfim_hamiltonian(int n, double h);

/// Z_a Z_b embedded in n sites, 1 <= a < b <= n.
qops::DenseOperator two_point_observable(int n, int a, int b);

/// Saturated boundary operator list at the set's working dimension. For the
/// open 1D TFIM this is always the single operator I x ... x I x Z.
std::vector<qops::DenseOperator> boundary_set(const ModelSpec& spec,
                                              const RelevantSet& set);

/// Ground-truth set for n sites: rho = |0...0><0...0|, H = TFIM, observable
/// Z_a Z_b, boundary from boundary_set.
RelevantSet initial_set(const ModelSpec& spec, int n, int obs_a = 1,
                        int obs_b = 2);

/// Adds l sites on the right:
///   H'   = H (x) I^l + sum_i B_i (x) R_l(B_i) + I (x) K
///   rho' = rho (x) (|0><0|)^l,  obs' = obs (x) I^l
/// with R_l(B) = Z on the first new site and K the environment-only TFIM
/// terms on the l new sites. The boundary list is rebuilt at the new
/// dimension. Works for both static and time-dependent Hamiltonians.
RelevantSet grow_set(const ModelSpec& spec, const RelevantSet& set, int l);

/// Checks the structural invariants (shared dimensions; trace/PSD/hermiticity
/// for non-virtual sets). Throws std::runtime_error on violation.
void validate(const RelevantSet& set);

}  // namespace olrg::model
