#include "olrg/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "olrg/qops.hpp"

namespace olrg::dynamics {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

double error_norm(const Matrix& err, const Matrix& y0, const Matrix& y1,
                  double atol, double rtol) {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < err.size(); ++j) {
    const double sc =
        atol + rtol * std::max(std::abs(y0(j)), std::abs(y1(j)));
    const double q = std::abs(err(j)) / sc;
    acc += q * q;
  }
  return std::sqrt(acc / static_cast<double>(err.size()));
}

Method resolve(const SolverConfig& cfg, Eigen::Index dim) {
  if (cfg.method != Method::automatic) return cfg.method;
  return dim <= 64 ? Method::exact_expm : Method::adaptive_rk;
}

struct Eigs {
  Matrix vectors;
  Eigen::VectorXd values;
};

Eigs diagonalize(const Matrix& h) {
  if (!h.allFinite())
    throw std::runtime_error("expm: non-finite Hamiltonian entries");
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("expm: eigendecomposition failed");
  return {es.eigenvectors(), es.eigenvalues()};
}

Matrix unitary_from(const Eigs& eg, double t) {
  Eigen::VectorXcd phases(eg.values.size());
  for (Eigen::Index i = 0; i < eg.values.size(); ++i)
    phases(i) = std::exp(Complex(0.0, -eg.values(i) * t));
  return eg.vectors * phases.asDiagonal() * eg.vectors.adjoint();
}

}  // namespace

Checkpoints Checkpoints::uniform(double total_time, int count) {
  if (count < 1) throw std::invalid_argument("Checkpoints: count must be >= 1");
  if (total_time <= 0.0)
    throw std::invalid_argument("Checkpoints: total_time must be > 0");
  Checkpoints pts;
  pts.total_time = total_time;
  pts.times.reserve(count);
  for (int m = 1; m <= count; ++m)
    pts.times.push_back(total_time * static_cast<double>(m) /
                        static_cast<double>(count));
  pts.times.back() = total_time;
  return pts;
}

Matrix expm(const Matrix& h, double t) { return unitary_from(diagonalize(h), t); }

Matrix integrate(const std::function<Matrix(double, const Matrix&)>& f,
                 Matrix y0, double t0, double t1, const SolverConfig& cfg) {
  const double span = t1 - t0;
  if (span == 0.0) return y0;

  double t = t0;
  Matrix y = std::move(y0);
  Matrix k1 = f(t, y);
  double h = span / 64.0;
  if (cfg.max_step > 0.0) h = std::min(h, cfg.max_step);
  const double hmin = std::abs(span) * 1e-14;

  while (t < t1) {
    h = std::min(h, t1 - t);
    const Matrix k2 = f(t + c2 * h, y + h * (a21 * k1));
    const Matrix k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    const Matrix k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Matrix k5 =
        f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Matrix k6 = f(
        t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Matrix y1 =
        y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Matrix k7 = f(t + h, y1);
    const Matrix err =
        h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    if (!y1.allFinite())
      throw std::runtime_error("integrate: solver state diverged");

    const double en = error_norm(err, y, y1, cfg.abs_tol, cfg.rel_tol);
    if (en <= 1.0) {
      t += h;
      y = y1;
      k1 = k7;  // FSAL
    }
    double factor = 0.9 * std::pow(std::max(en, 1e-10), -0.2);
    factor = std::clamp(factor, 0.2, 5.0);
    h *= factor;
    if (cfg.max_step > 0.0) h = std::min(h, cfg.max_step);
    if (h < hmin)
      throw std::runtime_error("integrate: step size underflow");
  }
  return y;
}

std::vector<Matrix> heisenberg_evolve(const Matrix& h, const Matrix& a,
                                      const Checkpoints& pts,
                                      const SolverConfig& cfg) {
  if (h.rows() != a.rows() || h.cols() != a.cols())
    throw std::invalid_argument("heisenberg_evolve: dimension mismatch");

  std::vector<Matrix> out;
  out.reserve(pts.times.size());
  if (resolve(cfg, h.rows()) == Method::exact_expm) {
    const Eigs eg = diagonalize(h);
    for (double t : pts.times) {
      const Matrix u = unitary_from(eg, t);
      out.push_back(u.adjoint() * a * u);
    }
    return out;
  }

  auto rhs = [&h](double, const Matrix& y) -> Matrix {
    return kImag * (h * y - y * h);
  };
  Matrix y = a;
  double t_prev = 0.0;
  for (double t : pts.times) {
    y = integrate(rhs, std::move(y), t_prev, t, cfg);
    out.push_back(y);
    t_prev = t;
  }
  return out;
}

std::vector<Matrix> propagator_checkpoints(
    const std::function<Matrix(double)>& h_of_t, const Checkpoints& pts,
    const SolverConfig& cfg) {
  const Matrix h0 = h_of_t(0.0);
  auto rhs = [&h_of_t](double t, const Matrix& u) -> Matrix {
    return Complex(0.0, -1.0) * (h_of_t(t) * u);
  };
  // The exact flow is unitary; projecting onto the polar factor at each
  // checkpoint keeps the accumulated truncation drift off the U^dag U = I
  // invariant without changing the convergence order.
  auto reunitarize = [](Matrix u) -> Matrix {
    Eigen::SelfAdjointEigenSolver<Matrix> es(u.adjoint() * u);
    Eigen::VectorXd inv_sqrt = es.eigenvalues().cwiseSqrt().cwiseInverse();
    return u * (es.eigenvectors() * inv_sqrt.asDiagonal() *
                es.eigenvectors().adjoint());
  };
  std::vector<Matrix> out;
  out.reserve(pts.times.size());
  Matrix u = Matrix::Identity(h0.rows(), h0.cols());
  double t_prev = 0.0;
  for (double t : pts.times) {
    u = reunitarize(integrate(rhs, std::move(u), t_prev, t, cfg));
    out.push_back(u);
    t_prev = t;
  }
  return out;
}

std::vector<Matrix> evolve_time_dependent(
    const std::function<Matrix(double)>& h_of_t, const Matrix& a,
    const Checkpoints& pts, const SolverConfig& cfg, Picture picture) {
  std::vector<Matrix> props = propagator_checkpoints(h_of_t, pts, cfg);
  std::vector<Matrix> out;
  out.reserve(props.size());
  for (const Matrix& u : props)
    out.push_back(picture == Picture::heisenberg ? Matrix(u.adjoint() * a * u)
                                                 : Matrix(u * a * u.adjoint()));
  return out;
}

Matrix trotter_step(const Matrix& sys_u,
                    const std::vector<std::pair<Matrix, Matrix>>& boundary_terms,
                    const Matrix& env_k, double delta) {
  const Eigen::Index env_d = env_k.rows();
  Matrix step = qops::kron(sys_u, qops::identity(env_d));
  for (const auto& [b, r] : boundary_terms) {
    if (b.rows() * r.rows() != step.rows())
      throw std::invalid_argument("trotter_step: inconsistent dimensions");
    step = step * expm(qops::kron(b, r), delta);
  }
  step = step * expm(qops::kron(qops::identity(step.rows() / env_d), env_k),
                     delta);
  return step;
}

}  // namespace olrg::dynamics
