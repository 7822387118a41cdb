#include "olrg/engine.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>

#include "olrg/rng.hpp"

namespace olrg::engine {

namespace {

using ad::Cx;
using ad::Tape;

// Seed streams inside one epoch.
constexpr std::uint64_t kIndexStream = 0x01;
constexpr std::uint64_t kNoiseStream = 0x02;

struct TapedSet {
  int n_sites = 0;
  Eigen::Index dim = 0;
  Cx rho, obs, ham;
  std::vector<Cx> boundary;
  std::function<Cx(double)> ham_t;  // empty => static Hamiltonian

  bool time_dependent() const { return static_cast<bool>(ham_t); }
};

TapedSet to_taped(Tape& t, const model::RelevantSet& s) {
  if (s.time_dependent())
    throw std::invalid_argument("to_taped: expected a static set");
  TapedSet out;
  out.n_sites = s.n_sites;
  out.dim = s.dim();
  out.rho = ad::cx_constant(t, s.rho.data);
  out.obs = ad::cx_constant(t, s.observable.data);
  out.ham = ad::cx_constant(t, s.hamiltonian.data);
  for (const auto& b : s.boundary)
    out.boundary.push_back(ad::cx_constant(t, b.data));
  return out;
}

/// U(t_m) on the checkpoint grid. Static Hamiltonians use one Taylor
/// exponential per grid spacing and cumulative products; time-dependent ones
/// use fourth-order Magnus steps on Gauss-Legendre nodes.
std::vector<Cx> taped_propagators(Tape& t, const TapedSet& s,
                                  const dynamics::Checkpoints& grid,
                                  int substeps) {
  std::vector<Cx> props;
  props.reserve(grid.count());
  if (!s.time_dependent()) {
    const double dt = grid.total_time / grid.count();
    const Cx u_step =
        ad::cx_expm_taylor(t, ad::cx_scale(t, s.ham, Complex(0.0, -dt)));
    Cx u = u_step;
    props.push_back(u);
    for (int m = 1; m < grid.count(); ++m) {
      u = ad::cx_matmul(t, u, u_step);
      props.push_back(u);
    }
    return props;
  }

  const double c_lo = 0.5 - std::sqrt(3.0) / 6.0;
  const double c_hi = 0.5 + std::sqrt(3.0) / 6.0;
  const Eigen::Index d = s.dim;
  Cx u = ad::cx_constant(t, Matrix::Identity(d, d));
  double t_prev = 0.0;
  for (double t_m : grid.times) {
    const double span = t_m - t_prev;
    const double dt = span / substeps;
    for (int k = 0; k < substeps; ++k) {
      const double t0 = t_prev + k * dt;
      const Cx h1 = s.ham_t(t0 + c_lo * dt);
      const Cx h2 = s.ham_t(t0 + c_hi * dt);
      const Cx sum = ad::cx_add(t, h1, h2);
      const Cx comm = ad::cx_sub(t, ad::cx_matmul(t, h2, h1),
                                 ad::cx_matmul(t, h1, h2));
      const Cx omega = ad::cx_add(
          t, ad::cx_scale(t, sum, Complex(0.0, -dt / 2.0)),
          ad::cx_scale(t, comm,
                       Complex(-std::sqrt(3.0) * dt * dt / 12.0, 0.0)));
      u = ad::cx_matmul(t, ad::cx_expm_taylor(t, omega), u);
    }
    props.push_back(u);
    t_prev = t_m;
  }
  return props;
}

/// Grid-checkpoint correlator evaluation on the tape; boundary operators are
/// conjugated lazily per (operator, time slot).
class TapedChi {
 public:
  TapedChi(Tape& t, const TapedSet& s, const dynamics::Checkpoints& grid,
           int substeps)
      : t_(t), set_(s), grid_(grid) {
    props_ = taped_propagators(t, s, grid, substeps);
    obs_t_ = ad::cx_conj_by(t_, props_.back(), s.obs);
    b_cache_.assign(s.boundary.size(),
                    std::vector<std::optional<Cx>>(grid.count()));
  }

  Cx chi(const tobc::TOBCIndex& idx) {
    Cx acc = obs_t_;
    for (int j = idx.order - 1; j >= 0; --j) {
      const Cx b = boundary_at(idx.boundary_ids[j], slot(idx.times[j]));
      acc = ad::cx_ad(t_, b, idx.signs[j], acc);
    }
    return ad::cx_trace(t_, ad::cx_matmul(t_, set_.rho, acc));
  }

 private:
  int slot(double time) const {
    const double step = grid_.total_time / grid_.count();
    const int m = static_cast<int>(std::lround(time / step)) - 1;
    if (m < 0 || m >= grid_.count())
      throw std::invalid_argument("TapedChi: time not on grid");
    return m;
  }

  Cx boundary_at(int id, int m) {
    auto& slot_cache = b_cache_[id][m];
    if (!slot_cache)
      slot_cache = ad::cx_conj_by(t_, props_[m], set_.boundary[id]);
    return *slot_cache;
  }

  Tape& t_;
  const TapedSet& set_;
  const dynamics::Checkpoints& grid_;
  std::vector<Cx> props_;
  Cx obs_t_;
  std::vector<std::vector<std::optional<Cx>>> b_cache_;
};

TapedSet conjugate(Tape& t, const TapedSet& s, Cx v, Eigen::Index d_out) {
  TapedSet out;
  out.n_sites = s.n_sites;
  out.dim = d_out;
  out.rho = ad::cx_conj_by(t, v, s.rho);
  out.obs = ad::cx_conj_by(t, v, s.obs);
  out.ham = ad::cx_conj_by(t, v, s.ham);
  for (const auto& b : s.boundary)
    out.boundary.push_back(ad::cx_conj_by(t, v, b));
  return out;
}

TapedSet grow(Tape& t, const TapedSet& s, const model::ModelSpec& spec, int l) {
  const Eigen::Index env_d = Eigen::Index(1) << l;
  const Matrix z = qops::pauli(qops::Pauli::Z).data;
  const Cx conn = ad::cx_constant(t, qops::kron(z, qops::identity(env_d / 2)));
  const Cx env_eye = ad::cx_constant(t, qops::identity(env_d));
  const Cx env_field = ad::cx_constant(
      t, qops::kron(qops::identity(s.dim),
                    model::tfim_hamiltonian(l, spec.h).data));

  TapedSet out;
  out.n_sites = s.n_sites + l;
  out.dim = s.dim * env_d;

  Matrix zero_env = Matrix::Zero(env_d, env_d);
  zero_env(0, 0) = 1.0;
  out.rho = ad::cx_kron(t, s.rho, ad::cx_constant(t, zero_env));
  out.obs = ad::cx_kron(t, s.obs, env_eye);

  Cx coupling{-1, -1};
  bool first = true;
  for (const auto& b : s.boundary) {
    const Cx term = ad::cx_kron(t, b, conn);
    coupling = first ? term : ad::cx_add(t, coupling, term);
    first = false;
  }
  coupling = ad::cx_add(t, coupling, env_field);

  if (s.time_dependent()) {
    auto inner = s.ham_t;
    out.ham_t = [&t, inner, env_eye, coupling](double time) -> Cx {
      return ad::cx_add(t, ad::cx_kron(t, inner(time), env_eye), coupling);
    };
  } else {
    out.ham = ad::cx_add(t, ad::cx_kron(t, s.ham, env_eye), coupling);
  }

  const Matrix fresh_boundary =
      qops::kron(qops::identity(s.dim * env_d / 2), z);
  out.boundary.push_back(ad::cx_constant(t, fresh_boundary));
  return out;
}

RealVector draw_noise(std::uint64_t seed, int n) {
  Rng rng(seed);
  RealVector noise(n);
  for (int i = 0; i < n; ++i) noise(i) = rng.normal();
  return noise;
}

}  // namespace

// ---------------------------------------------------------------------------
// OMM
// ---------------------------------------------------------------------------

OmmProblem::OmmProblem(Setup setup, omm::OMMParams prototype)
    : setup_(std::move(setup)), proto_(std::move(prototype)) {
  if ((setup_.target_n - setup_.start_n) % setup_.grow_l != 0)
    throw std::invalid_argument("OmmProblem: size gap not divisible by l");
}

namespace {

Cx omm_isometry(Tape& t, const omm::OMMParams& desc, const TapedSet& s,
                const RealVector& noise, MapOverride ov) {
  if (ov == MapOverride::identity_embedding) {
    const Matrix eye = Matrix::Identity(s.dim, s.dim);
    return ad::cx_thin_qr(t, ad::cx_constant(t, eye));
  }
  const int d = static_cast<int>(s.dim);
  const Tape::Id re_vec = t.reshape_rowmajor(s.ham.re, d * d, 1);
  const Tape::Id im_vec = t.reshape_rowmajor(s.ham.im, d * d, 1);
  const Tape::Id input = t.vstack(
      t.vstack(re_vec, im_vec),
      t.constant(RealMatrix(noise)));
  const Tape::Id out = nn::forward(t, desc.net, desc.layout, input);
  const int half = desc.d_big * desc.d_small;
  Cx pre;
  pre.re = t.reshape_rowmajor(t.block(out, 0, 0, half, 1), desc.d_big,
                              desc.d_small);
  pre.im = t.reshape_rowmajor(t.block(out, half, 0, half, 1), desc.d_big,
                              desc.d_small);
  return ad::cx_thin_qr(t, pre);
}

}  // namespace

EpochLoss OmmProblem::build_loss(ad::Tape& tape, std::uint64_t epoch_seed) const {
  const auto grid =
      dynamics::Checkpoints::uniform(setup_.total_time, setup_.checkpoints);
  const auto base = model::initial_set(setup_.spec, setup_.start_n);
  const TapedSet base_taped = to_taped(tape, base);
  const int z = proto_.ensemble_size;
  std::vector<TapedSet> copies(z, base_taped);

  EpochLoss out;
  Tape::Id total = tape.zeros(1, 1);
  for (int q = 0; q < setup_.steps(); ++q) {
    const auto indices = tobc::sample_mixed_orders(
        Rng::derive(Rng::derive(epoch_seed, kIndexStream), q), setup_.order,
        setup_.batch, grid, static_cast<int>(base.boundary.size()));

    Tape::Id step_sum = tape.zeros(1, 1);
    for (int c = 0; c < z; ++c) {
      const std::uint64_t noise_seed = Rng::derive(
          Rng::derive(epoch_seed, kNoiseStream),
          static_cast<std::uint64_t>(q) * 1000 + static_cast<std::uint64_t>(c));
      const RealVector noise = draw_noise(noise_seed, proto_.noise_dim);
      const Cx v = omm_isometry(tape, proto_, copies[c], noise,
                                setup_.map_override);
      const Eigen::Index d_out = tape.value(v.re).cols();
      const TapedSet virt = conjugate(tape, copies[c], v, d_out);

      TapedChi real_chi(tape, copies[c], grid, setup_.substeps);
      TapedChi virt_chi(tape, virt, grid, setup_.substeps);
      for (const auto& idx : indices) {
        const Cx diff =
            ad::cx_sub(tape, real_chi.chi(idx), virt_chi.chi(idx));
        step_sum = tape.add(step_sum, ad::cx_abs(tape, diff));
      }
      copies[c] = grow(tape, virt, setup_.spec, setup_.grow_l);
    }
    const Tape::Id step_loss = tape.scale(
        step_sum, 1.0 / (static_cast<double>(z) * indices.size()));
    out.per_step.push_back(tape.value(step_loss)(0, 0));
    out.sample_count += static_cast<long>(indices.size()) * z;
    total = tape.add(total, step_loss);
  }
  out.total = total;
  out.total_value = tape.value(total)(0, 0);
  return out;
}

double OmmProblem::predict(const std::vector<double>& theta,
                           std::uint64_t noise_seed,
                           const dynamics::SolverConfig& cfg) const {
  omm::OMMParams params = proto_;
  params.theta = theta;
  const auto base = model::initial_set(setup_.spec, setup_.start_n);
  const int z = params.ensemble_size;
  const auto grid = dynamics::Checkpoints::uniform(setup_.total_time, 1);

  double acc = 0.0;
  for (int c = 0; c < z; ++c) {
    model::RelevantSet set = base;
    for (int q = 0; q < setup_.steps(); ++q) {
      const std::uint64_t seed = Rng::derive(
          Rng::derive(noise_seed, kNoiseStream),
          static_cast<std::uint64_t>(q) * 1000 + static_cast<std::uint64_t>(c));
      model::RelevantSet virt;
      if (setup_.map_override == MapOverride::identity_embedding) {
        const auto v =
            qops::thin_qr_isometry(Matrix::Identity(set.dim(), set.dim()));
        virt = omm::conjugate_set(set, v.data);
      } else {
        virt = omm::omm_apply(params, set,
                              draw_noise(seed, params.noise_dim));
      }
      set = model::grow_set(setup_.spec, virt, setup_.grow_l);
    }
    acc += tobc::Evaluator(set, grid, cfg).expectation().real();
  }
  return acc / z;
}

// ---------------------------------------------------------------------------
// HEM
// ---------------------------------------------------------------------------

HemProblem::HemProblem(Setup setup, hem::PulseParams prototype)
    : setup_(std::move(setup)), proto_(std::move(prototype)) {
  if ((setup_.target_n - setup_.start_n) % setup_.grow_l != 0)
    throw std::invalid_argument("HemProblem: size gap not divisible by l");
}

namespace {

/// Taped pulse evaluations; v_pair values and the clock scale are shared.
struct TapedPulse {
  Tape& t;
  const hem::PulseParams& desc;
  Tape::Id t_scale;

  TapedPulse(Tape& tape, const hem::PulseParams& d) : t(tape), desc(d) {
    t_scale = t.exp_scalar(t.parameter(d.t_scale_offset, 1, 1));
  }

  Tape::Id clock(double time) {
    return t.mul_scalar(t.constant(RealMatrix::Constant(1, 1, time)), t_scale);
  }
  Tape::Id omega(double time) {
    return nn::forward(t, desc.omega_net, desc.omega_layout, clock(time));
  }
  Tape::Id delta(double time) {
    return nn::forward(t, desc.delta_net, desc.delta_layout, clock(time));
  }
  Tape::Id v_pair(int i) {
    return nn::forward(t, desc.v_net, desc.v_layout,
                       t.constant(RealMatrix::Constant(1, 1, double(i))));
  }
};

/// Taped device Hamiltonian of `n_sites`; real-valued matrix structure.
std::function<Cx(double)> taped_device(Tape& t, TapedPulse& pulse,
                                       int n_sites) {
  const auto basis = hem::DeviceBasis::make(n_sites);
  const Tape::Id sum_x = t.constant(basis->sum_x.real());
  const Tape::Id sum_n = t.constant(basis->sum_n.real());
  std::vector<std::pair<Tape::Id, Tape::Id>> bonds;  // (matrix, strength)
  for (std::size_t i = 0; i < basis->bonds.size(); ++i)
    bonds.emplace_back(t.constant(basis->bonds[i].real()),
                       pulse.v_pair(static_cast<int>(i) + 1));

  return [&t, &pulse, sum_x, sum_n, bonds](double time) -> Cx {
    Tape::Id re = t.sub(t.mul_scalar(sum_x, pulse.omega(time)),
                        t.mul_scalar(sum_n, pulse.delta(time)));
    for (const auto& [mat, strength] : bonds)
      re = t.add(re, t.mul_scalar(mat, strength));
    return ad::cx_from_real(t, re);
  };
}

}  // namespace

EpochLoss HemProblem::build_loss(ad::Tape& tape, std::uint64_t epoch_seed) const {
  const auto grid =
      dynamics::Checkpoints::uniform(setup_.total_time, setup_.checkpoints);
  const auto base = model::initial_set(setup_.spec, setup_.start_n);
  TapedSet real = to_taped(tape, base);
  TapedPulse pulse(tape, proto_);

  EpochLoss out;
  Tape::Id total = tape.zeros(1, 1);
  for (int q = 0; q < setup_.steps(); ++q) {
    const int m = setup_.start_n + q * setup_.grow_l;
    const auto indices = tobc::sample_mixed_orders(
        Rng::derive(Rng::derive(epoch_seed, kIndexStream), q), setup_.order,
        setup_.batch, grid, static_cast<int>(real.boundary.size()));

    TapedSet virt = real;
    virt.ham = Cx{-1, -1};
    virt.ham_t = taped_device(tape, pulse, m);

    TapedChi real_chi(tape, real, grid, setup_.substeps);
    TapedChi virt_chi(tape, virt, grid, setup_.substeps);
    Tape::Id step_sum = tape.zeros(1, 1);
    for (const auto& idx : indices) {
      const Cx diff = ad::cx_sub(tape, real_chi.chi(idx), virt_chi.chi(idx));
      step_sum = tape.add(step_sum, ad::cx_abs(tape, diff));
    }
    const Tape::Id step_loss =
        tape.scale(step_sum, 1.0 / static_cast<double>(indices.size()));
    out.per_step.push_back(tape.value(step_loss)(0, 0));
    out.sample_count += static_cast<long>(indices.size());
    total = tape.add(total, step_loss);

    real = grow(tape, virt, setup_.spec, setup_.grow_l);
  }
  out.total = total;
  out.total_value = tape.value(total)(0, 0);
  return out;
}

double HemProblem::predict(const std::vector<double>& theta,
                           const dynamics::SolverConfig& cfg) const {
  hem::PulseParams pulses = proto_;
  pulses.theta = theta;
  model::RelevantSet set = model::initial_set(setup_.spec, setup_.start_n);
  for (int q = 0; q < setup_.steps(); ++q) {
    const int m = setup_.start_n + q * setup_.grow_l;
    const auto dev = hem::DeviceHamiltonian::create(m, pulses);
    set = model::grow_set(setup_.spec, hem::hem_apply(set, dev),
                          setup_.grow_l);
  }
  const auto grid = dynamics::Checkpoints::uniform(setup_.total_time, 1);
  return tobc::Evaluator(set, grid, cfg).expectation().real();
}

}  // namespace olrg::engine
