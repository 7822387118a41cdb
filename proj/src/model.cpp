#include "olrg/model.hpp"

#include <memory>
#include <stdexcept>

namespace olrg::model {

namespace {

using qops::DenseOperator;
using qops::identity;
using qops::kron;

Matrix site_operator(int n, int site, const Matrix& op) {
  Matrix out = kron(identity(Eigen::Index(1) << (site - 1)), op);
  return kron(out, identity(Eigen::Index(1) << (n - site)));
}

Matrix zero_state(int l) {
  const Eigen::Index d = Eigen::Index(1) << l;
  Matrix rho = Matrix::Zero(d, d);
  rho(0, 0) = 1.0;
  return rho;
}

}  // namespace

qops::DenseOperator tfim_hamiltonian(int n, double h) {
  if (n < 1) throw std::invalid_argument("tfim_hamiltonian: n must be >= 1");
  const Matrix x = qops::pauli(qops::Pauli::X).data;
  const Matrix z = qops::pauli(qops::Pauli::Z).data;
  const Eigen::Index d = Eigen::Index(1) << n;
  Matrix ham = Matrix::Zero(d, d);
  for (int i = 1; i < n; ++i)
    ham += site_operator(n, i, z) * site_operator(n, i + 1, z);
  for (int i = 1; i <= n; ++i) ham += h * site_operator(n, i, x);
  return {std::move(ham), true};
}

qops::DenseOperator two_point_observable(int n, int a, int b) {
  if (!(1 <= a && a < b && b <= n))
    throw std::invalid_argument("two_point_observable: need 1 <= a < b <= n");
  const Matrix z = qops::pauli(qops::Pauli::Z).data;
  return {site_operator(n, a, z) * site_operator(n, b, z), true};
}

std::vector<qops::DenseOperator> boundary_set(const ModelSpec& spec,
                                              const RelevantSet& set) {
  if (spec.connecting_pairs.empty())
    throw std::invalid_argument("boundary_set: no connecting pairs");
  const Eigen::Index d = set.dim();
  const Matrix z = qops::pauli(qops::Pauli::Z).data;
  std::vector<qops::DenseOperator> out;
  out.push_back({kron(identity(d / 2), z), true});
  return out;
}

RelevantSet initial_set(const ModelSpec& spec, int n, int obs_a, int obs_b) {
  if (obs_a < 1 || obs_a > n || obs_b <= obs_a)
    throw std::invalid_argument("initial_set: need 1 <= a < b and a <= n");
  RelevantSet set;
  set.n_sites = n;
  set.rho = {zero_state(n), true};
  set.hamiltonian = tfim_hamiltonian(n, spec.h);
  // The observable restricted to the current system: Z_a alone until site b
  // exists (it then stays Z_a (x) I... under growth, matching Z_a Z_b only
  // when b <= n from the start).
  set.observable =
      obs_b <= n
          ? two_point_observable(n, obs_a, obs_b)
          : qops::DenseOperator{site_operator(
                n, obs_a, qops::pauli(qops::Pauli::Z).data), true};
  set.boundary = boundary_set(spec, set);
  set.is_virtual = false;
  return set;
}

RelevantSet grow_set(const ModelSpec& spec, const RelevantSet& set, int l) {
  if (l < 1) throw std::invalid_argument("grow_set: l must be >= 1");
  const Eigen::Index d = set.dim();
  const Eigen::Index env_d = Eigen::Index(1) << l;
  const Matrix z = qops::pauli(qops::Pauli::Z).data;

  // Connecting operator on the environment: Z on the first new site.
  const Matrix conn = kron(z, identity(env_d / 2));
  const Matrix env_k = tfim_hamiltonian(l, spec.h).data;

  RelevantSet out;
  out.n_sites = set.n_sites + l;
  out.is_virtual = set.is_virtual;
  out.rho = {kron(set.rho.data, zero_state(l)), set.rho.hermitian_hint};
  out.observable = {kron(set.observable.data, identity(env_d)),
                    set.observable.hermitian_hint};

  Matrix coupling = Matrix::Zero(d * env_d, d * env_d);
  for (const auto& b : set.boundary) coupling += kron(b.data, conn);
  coupling += kron(identity(d), env_k);

  if (set.time_dependent()) {
    auto inner = set.hamiltonian_t;
    auto fixed = std::make_shared<const Matrix>(std::move(coupling));
    out.hamiltonian_t = [inner, fixed, env_d](double t) -> Matrix {
      return kron(inner(t), identity(env_d)) + *fixed;
    };
  } else {
    bool herm = set.hamiltonian.hermitian_hint;
    for (const auto& b : set.boundary) herm = herm && b.hermitian_hint;
    out.hamiltonian = {kron(set.hamiltonian.data, identity(env_d)) + coupling,
                       herm};
  }

  out.boundary.clear();
  out.boundary.push_back({kron(identity(d * env_d / 2), z), true});
  return out;
}

void validate(const RelevantSet& set) {
  const Eigen::Index d = set.dim();
  auto check_dim = [&](const Matrix& m, const char* what) {
    if (m.rows() != d || m.cols() != d)
      throw std::runtime_error(std::string("RelevantSet: bad dimension for ") +
                               what);
  };
  if (!set.time_dependent()) check_dim(set.hamiltonian.data, "hamiltonian");
  check_dim(set.observable.data, "observable");
  for (const auto& b : set.boundary) check_dim(b.data, "boundary");

  if (set.is_virtual) return;
  if (std::abs(set.rho.data.trace() - Complex(1.0)) > 1e-10)
    throw std::runtime_error("RelevantSet: rho trace != 1");
  Eigen::SelfAdjointEigenSolver<Matrix> es(set.rho.data);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw std::runtime_error("RelevantSet: rho not PSD");
  if (!qops::is_hermitian(set.hamiltonian.data, 1e-10) ||
      !qops::is_hermitian(set.observable.data, 1e-10))
    throw std::runtime_error("RelevantSet: H or observable not Hermitian");
}

}  // namespace olrg::model
