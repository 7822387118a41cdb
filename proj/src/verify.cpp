#include "olrg/verify.hpp"

#include <cmath>
#include <stdexcept>

#include "olrg/omm.hpp"
#include "olrg/rng.hpp"

namespace olrg::verify {

namespace {

double operator_norm(const Matrix& m) {
  return m.jacobiSvd().singularValues()(0);
}

Matrix random_gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = Complex(rng.normal(), rng.normal());
  return m;
}

Matrix random_hermitian_unit(Rng& rng, Eigen::Index d) {
  Matrix g = random_gaussian(rng, d, d);
  Matrix h = 0.5 * (g + g.adjoint());
  return h / operator_norm(h);
}

/// p(S) = <O(T)> after growing the set to `target_sites`.
double property_at(const model::ModelSpec& spec, model::RelevantSet set,
                   int target_sites, int l, double T,
                   const dynamics::SolverConfig& cfg) {
  while (set.n_sites < target_sites) set = model::grow_set(spec, set, l);
  return tobc::eval_tobc(set, {}, T, cfg).real();
}

}  // namespace

double exact_expectation(int n, double h, int obs_a, int obs_b, double T,
                         const dynamics::SolverConfig& cfg) {
  if (n > 12)
    throw std::invalid_argument(
        "exact_expectation: n exceeds the dense-solver limit (12)");
  const model::ModelSpec spec{h};
  const auto set = model::initial_set(spec, n, obs_a, obs_b);
  if (T <= 0.0)
    return (set.rho.data * set.observable.data).trace().real();
  if (cfg.method == dynamics::Method::adaptive_rk) {
    const auto pts = dynamics::Checkpoints::uniform(T, 1);
    const auto obs =
        dynamics::heisenberg_evolve(set.hamiltonian.data,
                                    set.observable.data, pts, cfg);
    return (set.rho.data * obs.back()).trace().real();
  }
  const Matrix u = dynamics::expm(set.hamiltonian.data, T);
  return (set.rho.data * (u.adjoint() * set.observable.data * u))
      .trace()
      .real();
}

BoundReport check_telescoping(int n, int l, int q, double T, std::uint64_t seed,
                              bool identity_maps) {
  const model::ModelSpec spec{1.0};
  const dynamics::SolverConfig cfg;
  Rng rng(seed);
  const int target = n + q * l;
  const Eigen::Index d = Eigen::Index(1) << n;
  const Eigen::Index d_small = d >> l;

  // One fresh Haar-like isometry per step; eta_j = p(G^{q-j} D^j S). With
  // identity maps the whole chain is exact and every term collapses.
  std::vector<double> eta;
  model::RelevantSet chain = model::initial_set(spec, n);
  eta.push_back(property_at(spec, chain, target, l, T, cfg));
  for (int j = 0; j < q; ++j) {
    const Matrix v =
        identity_maps
            ? Matrix(Matrix::Identity(chain.dim(), chain.dim()))
            : qops::thin_qr_isometry(random_gaussian(rng, d, d_small)).data;
    chain = model::grow_set(spec, omm::conjugate_set(chain, v), l);
    eta.push_back(property_at(spec, chain, target, l, T, cfg));
  }

  BoundReport report;
  report.n = n;
  report.l = l;
  report.q = q;
  report.total_time = T;
  report.seed = seed;
  report.lhs = std::abs(eta.front() - eta.back());
  for (int j = 0; j < q; ++j) report.rhs += std::abs(eta[j] - eta[j + 1]);
  report.satisfied = report.lhs <= report.rhs + 1e-12;
  return report;
}

BoundReport check_rt_bound(int n, int l, double T, double perturbation,
                           std::uint64_t seed, int k_probe, int grid_points,
                           double h) {
  const model::ModelSpec spec{h};
  const dynamics::SolverConfig cfg;
  Rng rng(seed);
  const auto set = model::initial_set(spec, n);

  model::RelevantSet mapped = set;
  mapped.is_virtual = true;
  if (perturbation != 0.0) {
    auto perturb = [&](qops::DenseOperator& x) {
      x.data += perturbation * random_hermitian_unit(rng, x.dim());
    };
    perturb(mapped.rho);
    perturb(mapped.hamiltonian);
    perturb(mapped.observable);
    for (auto& b : mapped.boundary) perturb(b);
  }

  BoundReport report;
  report.n = n;
  report.l = l;
  report.q = 1;
  report.total_time = T;
  report.seed = seed;
  report.epsilon_lower_estimate = true;

  report.lhs = std::abs(
      property_at(spec, set, n + l, l, T, cfg) -
      property_at(spec, mapped, n + l, l, T, cfg));

  // Dense probe of the correlator deviations up to k_probe.
  const auto grid = dynamics::Checkpoints::uniform(T, grid_points);
  const tobc::Evaluator real_eval(set, grid, cfg);
  const tobc::Evaluator virt_eval(mapped, grid, cfg);
  const int n_boundary = static_cast<int>(set.boundary.size());
  double eps = 0.0;
  for (int k = 0; k <= k_probe; ++k) {
    tobc::TOBCIndex idx;
    idx.order = k;
    idx.boundary_ids.assign(k, 0);
    idx.times.assign(k, 0.0);
    idx.signs.assign(k, -1);
    // Odometer over (boundary, time, sign)^k.
    std::vector<int> digits(3 * k, 0);
    const auto radix = [&](int pos) {
      const int what = pos % 3;
      return what == 0 ? n_boundary : (what == 1 ? grid_points : 2);
    };
    while (true) {
      for (int j = 0; j < k; ++j) {
        idx.boundary_ids[j] = digits[3 * j];
        idx.times[j] = grid.times[digits[3 * j + 1]];
        idx.signs[j] = digits[3 * j + 2] == 0 ? -1 : 1;
      }
      eps = std::max(eps,
                     std::abs(real_eval.eval(idx) - virt_eval.eval(idx)));
      int pos = 0;
      for (; pos < 3 * k; ++pos) {
        if (++digits[pos] < radix(pos)) break;
        digits[pos] = 0;
      }
      if (pos == 3 * k) break;
    }
  }

  // C = max operator norm of the connecting operators and the environment
  // observable; |dH| = saturated boundary cardinality.
  const Eigen::Index env_d = Eigen::Index(1) << l;
  const Matrix conn = qops::kron(qops::pauli(qops::Pauli::Z).data,
                                 qops::identity(env_d / 2));
  const double c = std::max(operator_norm(conn), 1.0);  // O_E = identity
  report.epsilon = eps;
  report.constant_c = c;
  report.rhs = eps * c * std::exp(T * static_cast<double>(set.boundary.size()) *
                                  c / 2.0);
  report.satisfied = report.lhs <= report.rhs + 1e-12;
  return report;
}

std::vector<DysonRow> check_dyson_truncation(double T, int k_max, int M,
                                             double h, double coupling) {
  if (k_max < 0 || M < 1)
    throw std::invalid_argument("check_dyson_truncation: bad arguments");
  const Matrix z = qops::pauli(qops::Pauli::Z).data;
  const Matrix x = qops::pauli(qops::Pauli::X).data;
  const Matrix h_sys = model::tfim_hamiltonian(1, h).data;  // h * X
  const Matrix env_k = h_sys;                               // one new site
  const Matrix boundary = coupling * z;
  const Matrix conn = z;
  // Off-axis system observable: a single-axis choice would zero out every
  // other order of the series through the spin-parity selection rule.
  const Matrix obs_sys = x + z;
  const Matrix obs_env = z;
  Matrix rho_site = Matrix::Zero(2, 2);
  rho_site(0, 0) = 1.0;
  const Matrix rho = qops::kron(rho_site, rho_site);

  // Exact value under the grown two-site Hamiltonian.
  const Matrix h2 = qops::kron(h_sys, qops::identity(2)) +
                    qops::kron(boundary, conn) +
                    qops::kron(qops::identity(2), env_k);
  const Matrix u = dynamics::expm(h2, T);
  const Complex exact =
      (rho * (u.adjoint() * qops::kron(obs_sys, obs_env) * u)).trace();

  const double delta = T / M;
  auto evolved = [](const Matrix& ham, const Matrix& a, double t) -> Matrix {
    const Matrix ut = dynamics::expm(ham, t);
    return ut.adjoint() * a * ut;
  };

  // Degree-tracked product of exp((i delta / 2) T_m) factors, applied from
  // the latest time slice inward.
  std::vector<Matrix> degree(k_max + 1, Matrix::Zero(4, 4));
  degree[0] =
      qops::kron(evolved(h_sys, obs_sys, T), evolved(env_k, obs_env, T));

  for (int m = M - 1; m >= 0; --m) {
    const double t = m * delta;
    const Matrix b_t = evolved(h_sys, boundary, t);
    const Matrix r_t = evolved(env_k, conn, t);
    const Matrix bc = qops::kron(b_t, r_t);
    const Matrix bi = qops::kron(b_t, qops::identity(2));
    const Matrix ic = qops::kron(qops::identity(2), r_t);
    auto apply_t = [&](const Matrix& x) -> Matrix {
      // sum over sigma of ad_{B,sigma} (x) ad_{R,-sigma}
      Matrix out = Matrix::Zero(4, 4);
      for (int sigma : {-1, +1}) {
        const double s = sigma;
        out += bc * x + (-s) * (bi * x * ic) + s * (ic * x * bi) -
               x * bc;
      }
      return out;
    };

    std::vector<std::vector<Matrix>> powers(1, degree);
    for (int a = 1; a <= k_max; ++a) {
      std::vector<Matrix> next(k_max + 1, Matrix::Zero(4, 4));
      for (int j = 0; j + a <= k_max; ++j) next[j] = apply_t(powers[a - 1][j]);
      powers.push_back(std::move(next));
    }
    const Complex step_factor = Complex(0.0, delta / 2.0);
    std::vector<Matrix> updated(k_max + 1, Matrix::Zero(4, 4));
    for (int j = 0; j <= k_max; ++j) {
      Complex coeff(1.0, 0.0);
      double factorial = 1.0;
      for (int a = 0; a <= j; ++a) {
        if (a > 0) {
          coeff *= step_factor;
          factorial *= a;
        }
        updated[j] += (coeff / factorial) * powers[a][j - a];
      }
    }
    degree = std::move(updated);
  }

  std::vector<DysonRow> rows;
  Complex partial(0.0, 0.0);
  for (int k = 0; k <= k_max; ++k) {
    partial += (rho * degree[k]).trace();
    rows.push_back({k, std::abs(partial - exact)});
  }
  return rows;
}

namespace {

Matrix random_2x2(Rng& rng) { return random_gaussian(rng, 2, 2); }

double max_dev(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

double lemma_adjoint_expansion(int instances, std::uint64_t seed) {
  Rng rng(seed);
  double dev = 0.0;
  for (int i = 0; i < instances; ++i) {
    const Matrix a1 = random_2x2(rng), a2 = random_2x2(rng), b = random_2x2(rng);
    for (int s : {-1, +1}) {
      const Matrix lhs = qops::adjoint_apply(Matrix(a1 + a2), s, b);
      const Matrix rhs =
          qops::adjoint_apply(a1, s, b) + qops::adjoint_apply(a2, s, b);
      dev = std::max(dev, max_dev(lhs, rhs));
    }
  }
  return dev;
}

double lemma_adjoint_kron(int instances, std::uint64_t seed) {
  Rng rng(seed);
  double dev = 0.0;
  for (int i = 0; i < instances; ++i) {
    const Matrix a = random_2x2(rng), b = random_2x2(rng);
    const Matrix x = random_2x2(rng), y = random_2x2(rng);
    const Matrix ab = qops::kron(a, b);
    const Matrix xy = qops::kron(x, y);
    for (int s : {-1, +1}) {
      Matrix rhs1 = Matrix::Zero(4, 4);
      for (int r : {-1, +1})
        rhs1 += qops::kron(qops::adjoint_apply(a, r, x),
                           qops::adjoint_apply(b, s * r, y));
      dev = std::max(dev, max_dev(qops::adjoint_apply(ab, s, xy), 0.5 * rhs1));

      const Matrix lhs2 =
          qops::adjoint_apply(ab, s, qops::adjoint_apply(ab, s, xy));
      Matrix rhs2 = Matrix::Zero(4, 4);
      for (int s1 : {-1, +1})
        for (int s2 : {-1, +1})
          rhs2 += qops::kron(
              qops::adjoint_apply(a, s1, qops::adjoint_apply(a, s2, x)),
              qops::adjoint_apply(b, s * s1, qops::adjoint_apply(b, s * s2, y)));
      dev = std::max(dev, max_dev(lhs2, 0.25 * rhs2));
    }
  }
  return dev;
}

double lemma_adjoint_power(int instances, std::uint64_t seed) {
  Rng rng(seed);
  double dev = 0.0;
  for (int i = 0; i < instances; ++i) {
    const Matrix a1 = random_2x2(rng), a2 = random_2x2(rng), b = random_2x2(rng);
    for (int s : {-1, +1}) {
      const Matrix sum = a1 + a2;
      const Matrix lhs =
          qops::adjoint_apply(sum, s, qops::adjoint_apply(sum, s, b));
      const Matrix rhs =
          qops::adjoint_apply(a1, s, qops::adjoint_apply(a1, s, b)) +
          qops::adjoint_apply(a1, s, qops::adjoint_apply(a2, s, b)) +
          qops::adjoint_apply(a2, s, qops::adjoint_apply(a1, s, b)) +
          qops::adjoint_apply(a2, s, qops::adjoint_apply(a2, s, b));
      dev = std::max(dev, max_dev(lhs, rhs));
    }
  }
  return dev;
}

}  // namespace olrg::verify
