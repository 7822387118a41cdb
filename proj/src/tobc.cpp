#include "olrg/tobc.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "olrg/qops.hpp"
#include "olrg/rng.hpp"

namespace olrg::tobc {

namespace {

/// U(t) for every requested time; time-dependent propagators are integrated
/// once in one ascending sweep.
std::map<double, Matrix> propagators_at(const model::RelevantSet& set,
                                        std::vector<double> times,
                                        const dynamics::SolverConfig& cfg) {
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  std::map<double, Matrix> out;
  if (set.time_dependent()) {
    auto rhs = [&set](double s, const Matrix& y) -> Matrix {
      return Complex(0.0, -1.0) * (set.hamiltonian_t(s) * y);
    };
    Matrix u = Matrix::Identity(set.dim(), set.dim());
    double t_prev = 0.0;
    for (double t : times) {
      u = dynamics::integrate(rhs, std::move(u), t_prev, t, cfg);
      out.emplace(t, u);
      t_prev = t;
    }
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(set.hamiltonian.data);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("propagators_at: eigendecomposition failed");
  for (double t : times) {
    Eigen::VectorXcd phases(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < phases.size(); ++i)
      phases(i) = std::exp(Complex(0.0, -es.eigenvalues()(i) * t));
    out.emplace(t, Matrix(es.eigenvectors() * phases.asDiagonal() *
                          es.eigenvectors().adjoint()));
  }
  return out;
}

std::vector<double> collect_times(std::span<const TOBCIndex> indices, double T) {
  std::vector<double> times{T};
  for (const auto& idx : indices)
    times.insert(times.end(), idx.times.begin(), idx.times.end());
  return times;
}

Complex eval_cached(const model::RelevantSet& set, const TOBCIndex& idx,
                    double T, const std::map<double, Matrix>& props) {
  auto heisenberg = [&](const Matrix& a, double t) -> Matrix {
    const Matrix& u = props.at(t);
    return u.adjoint() * a * u;
  };
  Matrix acc = heisenberg(set.observable.data, T);
  for (int j = idx.order - 1; j >= 0; --j) {
    const int id = idx.boundary_ids[j];
    if (id < 0 || id >= static_cast<int>(set.boundary.size()))
      throw std::invalid_argument("eval_tobc: boundary id out of range");
    acc = qops::adjoint_apply(heisenberg(set.boundary[id].data, idx.times[j]),
                              idx.signs[j], acc);
  }
  return (set.rho.data * acc).trace();
}

}  // namespace

std::vector<TOBCIndex> sample_indices(std::uint64_t seed, int order, int batch,
                                      const dynamics::Checkpoints& grid,
                                      int n_boundary) {
  if (batch < 1) throw std::invalid_argument("sample_indices: batch must be >= 1");
  if (order < 0) throw std::invalid_argument("sample_indices: order must be >= 0");
  Rng rng(seed);
  std::vector<TOBCIndex> out;
  out.reserve(batch);
  for (int b = 0; b < batch; ++b) {
    TOBCIndex idx;
    idx.order = order;
    for (int j = 0; j < order; ++j) {
      idx.boundary_ids.push_back(
          static_cast<int>(rng.below(static_cast<std::uint64_t>(n_boundary))));
      idx.times.push_back(
          grid.times[rng.below(static_cast<std::uint64_t>(grid.count()))]);
      idx.signs.push_back(rng.sign());
    }
    out.push_back(std::move(idx));
  }
  return out;
}

std::vector<TOBCIndex> sample_mixed_orders(std::uint64_t seed, int order_cutoff,
                                           int batch,
                                           const dynamics::Checkpoints& grid,
                                           int n_boundary) {
  const int n_orders = order_cutoff + 1;
  std::vector<TOBCIndex> out;
  out.reserve(batch);
  for (int k = 0; k <= order_cutoff; ++k) {
    int share = batch / n_orders + (k < batch % n_orders ? 1 : 0);
    if (share == 0) continue;
    auto part = sample_indices(Rng::derive(seed, static_cast<std::uint64_t>(k)),
                               k, share, grid, n_boundary);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

Complex eval_tobc(const model::RelevantSet& set, const TOBCIndex& idx, double T,
                  const dynamics::SolverConfig& cfg) {
  const auto props =
      propagators_at(set, collect_times(std::span(&idx, 1), T), cfg);
  return eval_cached(set, idx, T, props);
}

Evaluator::Evaluator(const model::RelevantSet& set,
                     const dynamics::Checkpoints& grid,
                     const dynamics::SolverConfig& cfg)
    : rho_(set.rho.data), grid_(grid) {
  const auto props = propagators_at(set, grid.times, cfg);
  const Matrix& u_final = props.at(grid.times.back());
  obs_t_ = u_final.adjoint() * set.observable.data * u_final;
  boundary_t_.resize(set.boundary.size());
  for (std::size_t i = 0; i < set.boundary.size(); ++i) {
    boundary_t_[i].reserve(grid.count());
    for (double t : grid.times) {
      const Matrix& u = props.at(t);
      boundary_t_[i].push_back(u.adjoint() * set.boundary[i].data * u);
    }
  }
}

int Evaluator::time_slot(double t) const {
  const double step = grid_.total_time / grid_.count();
  const int slot = static_cast<int>(std::lround(t / step)) - 1;
  if (slot < 0 || slot >= grid_.count() ||
      std::abs(grid_.times[slot] - t) > 1e-9 * std::max(1.0, grid_.total_time))
    throw std::invalid_argument("Evaluator: time not on the checkpoint grid");
  return slot;
}

Complex Evaluator::eval(const TOBCIndex& idx) const {
  Matrix acc = obs_t_;
  for (int j = idx.order - 1; j >= 0; --j) {
    const int id = idx.boundary_ids[j];
    if (id < 0 || id >= static_cast<int>(boundary_t_.size()))
      throw std::invalid_argument("Evaluator: boundary id out of range");
    acc = qops::adjoint_apply(boundary_t_[id][time_slot(idx.times[j])],
                              idx.signs[j], acc);
  }
  return (rho_ * acc).trace();
}

Complex Evaluator::expectation() const { return (rho_ * obs_t_).trace(); }

double loss_step(const model::RelevantSet& real_set,
                 const model::RelevantSet& virtual_set,
                 std::span<const TOBCIndex> indices, double T,
                 const dynamics::SolverConfig& cfg) {
  if (real_set.boundary.size() != virtual_set.boundary.size())
    throw std::invalid_argument("loss_step: boundary cardinality mismatch");
  if (indices.empty()) return 0.0;

  const auto times = collect_times(indices, T);
  const auto props_r = propagators_at(real_set, times, cfg);
  const auto props_v = propagators_at(virtual_set, times, cfg);
  double acc = 0.0;
  for (const auto& idx : indices)
    acc += std::abs(eval_cached(real_set, idx, T, props_r) -
                    eval_cached(virtual_set, idx, T, props_v));
  return acc / static_cast<double>(indices.size());
}

LossReport total_loss(
    std::span<const std::pair<model::RelevantSet, model::RelevantSet>> chain,
    const SamplerSettings& sampler, double T,
    const dynamics::SolverConfig& cfg) {
  LossReport report;
  const auto grid = dynamics::Checkpoints::uniform(T, sampler.checkpoints);
  for (std::size_t q = 0; q < chain.size(); ++q) {
    const auto& [real_set, virtual_set] = chain[q];
    auto indices = sample_mixed_orders(
        Rng::derive(sampler.seed, q), sampler.order_cutoff, sampler.batch, grid,
        static_cast<int>(real_set.boundary.size()));
    report.per_step.push_back(
        loss_step(real_set, virtual_set, indices, T, cfg));
    report.total += report.per_step.back();
    report.sample_count += static_cast<long>(indices.size());
  }
  return report;
}

}  // namespace olrg::tobc
