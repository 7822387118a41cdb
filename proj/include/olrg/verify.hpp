#pragma once

#include <cstdint>
#include <vector>

#include "olrg/tobc.hpp"

namespace olrg::verify {

struct BoundReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = false;
  int n = 0, l = 0, q = 0;
  double total_time = 0.0;
  std::uint64_t seed = 0;
  // rt-bound extras: the probed deviation is a lower estimate of the true
  // supremum over all orders.
  double epsilon = 0.0;
  double constant_c = 0.0;
  bool epsilon_lower_estimate = false;
};

/// Ground-truth <Z_a Z_b>(T) for the n-site chain from |0...0>, dense solver.
/// n > 12 is rejected as a resource error.
double exact_expectation(int n, double h, int obs_a, int obs_b, double T,
                         const dynamics::SolverConfig& cfg = {});

/// Triangle/telescoping inequality over q compress-then-grow steps with
/// independent Haar-like isometries:
///   |p(G^q S) - p(D^q S)| <= sum_j |p(G^{q-j} D^j S) - p(G^{q-j-1} D^{j+1} S)|
/// with p evaluated at the target size.
BoundReport check_telescoping(int n, int l, int q, double T, std::uint64_t seed,
                              bool identity_maps = false);

/// Single-step real-time bound with an additive Hermitian perturbation as the
/// operator map: lhs = |p(G S) - p(G f(S))|, rhs = eps * C * exp(T*|dH|*C/2)
/// where eps is the max correlator deviation over a dense index grid up to
/// k_probe (a lower estimate of the supremum).
BoundReport check_rt_bound(int n, int l, double T, double perturbation,
                           std::uint64_t seed, int k_probe = 3,
                           int grid_points = 10, double h = 1.0);

struct DysonRow {
  int order = 0;
  double error = 0.0;
};

/// Reconstructs <(Z x Z)(T)> on the 1+1-site chain from the boundary-coupling
/// series truncated at each order k <= k_max with M time slices; returns
/// |series(k, M) - exact| per order.
std::vector<DysonRow> check_dyson_truncation(double T, int k_max, int M,
                                             double h = 1.0,
                                             double coupling = 1.0);

// Algebraic identity batteries on random 2x2 operators; each returns the
// maximum elementwise deviation over `instances` draws.

/// ad_{A1+A2,s}(B) = ad_{A1,s}(B) + ad_{A2,s}(B).
double lemma_adjoint_expansion(int instances, std::uint64_t seed);
/// ad_{AxB,s}(XxY) = (1/2) sum_r ad_{A,r}(X) x ad_{B,s*r}(Y), plus the k = 2
/// iterated form.
double lemma_adjoint_kron(int instances, std::uint64_t seed);
/// ad^2_{A1+A2,s}(B) expands into the four composition terms.
double lemma_adjoint_power(int instances, std::uint64_t seed);

}  // namespace olrg::verify
