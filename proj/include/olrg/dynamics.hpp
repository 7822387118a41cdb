#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "olrg/types.hpp"

namespace olrg::dynamics {

/// Uniform checkpoint grid t_m = m*T/M for m = 1..M. t = 0 is excluded; the
/// last point equals T.
struct Checkpoints {
  double total_time = 0.0;
  std::vector<double> times;

  static Checkpoints uniform(double total_time, int count);
  int count() const { return static_cast<int>(times.size()); }
};

enum class Method {
  automatic,    // exact exponential for dim <= 64, adaptive RK otherwise
  adaptive_rk,
  exact_expm,
};

enum class Picture { heisenberg, schrodinger };

struct SolverConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-9;
  Method method = Method::automatic;
  double max_step = 0.0;  // 0 = unrestricted
};

/// exp(-i t H) for Hermitian H, via eigendecomposition.
Matrix expm(const Matrix& h, double t);

/// Heisenberg-picture checkpoints A(t_m) = e^{+iHt} A e^{-iHt}, either through
/// the exponential or by integrating dA/dt = i[H, A].
std::vector<Matrix> heisenberg_evolve(const Matrix& h, const Matrix& a,
                                      const Checkpoints& pts,
                                      const SolverConfig& cfg);

/// Checkpointed evolution under a time-dependent Hamiltonian with the
/// time-ordered propagator U(t): A(t) = U^dag A U (Heisenberg) or
/// A(t) = U A U^dag (Schrodinger / von Neumann).
std::vector<Matrix> evolve_time_dependent(
    const std::function<Matrix(double)>& h_of_t, const Matrix& a,
    const Checkpoints& pts, const SolverConfig& cfg, Picture picture);

/// Time-ordered propagators U(t_m) solving dU/dt = -i H(t) U, U(0) = I.
std::vector<Matrix> propagator_checkpoints(
    const std::function<Matrix(double)>& h_of_t, const Checkpoints& pts,
    const SolverConfig& cfg);

/// One first-order product-formula step of the grown device evolution:
///   [sys_u (x) I] * prod_i exp(-i delta B_i (x) R_i) * exp(-i delta I (x) K).
/// `sys_u` is the caller-supplied single-step system unitary.
Matrix trotter_step(const Matrix& sys_u,
                    const std::vector<std::pair<Matrix, Matrix>>& boundary_terms,
                    const Matrix& env_k, double delta);

/// Adaptive Dormand-Prince 5(4) on a matrix-valued ODE y' = f(t, y).
Matrix integrate(const std::function<Matrix(double, const Matrix&)>& f,
                 Matrix y0, double t0, double t1, const SolverConfig& cfg);

}  // namespace olrg::dynamics
