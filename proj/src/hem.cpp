#include "olrg/hem.hpp"

#include <cmath>
#include <stdexcept>

#include "olrg/qops.hpp"

namespace olrg::hem {

namespace {

RealVector scalar_vec(double v) {
  RealVector x(1);
  x(0) = v;
  return x;
}

nn::Shape scalar_net(int depth, int width) {
  nn::Shape s;
  s.in = 1;
  s.hidden.assign(depth, width);
  s.out = 1;
  return s;
}

}  // namespace

PulseParams PulseParams::create(int depth, int width, std::uint64_t seed) {
  PulseParams p;
  p.omega_net = scalar_net(depth, width);
  p.delta_net = scalar_net(depth, width);
  p.v_net = scalar_net(depth, width);

  Rng rng(seed);
  p.omega_layout = nn::make_layout(p.omega_net, 0);
  nn::init_params(p.omega_net, rng, p.theta);
  p.delta_layout = nn::make_layout(p.delta_net, p.omega_layout.size);
  nn::init_params(p.delta_net, rng, p.theta);
  p.v_layout =
      nn::make_layout(p.v_net, p.delta_layout.begin + p.delta_layout.size);
  nn::init_params(p.v_net, rng, p.theta);
  p.t_scale_offset = p.v_layout.begin + p.v_layout.size;
  p.theta.push_back(0.0);  // t_scale = exp(0) = 1
  return p;
}

double PulseParams::t_scale() const { return std::exp(theta[t_scale_offset]); }

double PulseParams::omega(double t) const {
  return nn::forward(omega_net, omega_layout, theta,
                     scalar_vec(t_scale() * t))(0);
}

double PulseParams::delta(double t) const {
  return nn::forward(delta_net, delta_layout, theta,
                     scalar_vec(t_scale() * t))(0);
}

double PulseParams::v_pair(int pair_index) const {
  return nn::forward(v_net, v_layout, theta,
                     scalar_vec(static_cast<double>(pair_index)))(0);
}

std::shared_ptr<const DeviceBasis> DeviceBasis::make(int n_sites) {
  if (n_sites < 1)
    throw std::invalid_argument("DeviceBasis: n_sites must be >= 1");
  const Matrix x = qops::pauli(qops::Pauli::X).data;
  const Matrix z = qops::pauli(qops::Pauli::Z).data;
  const Matrix n_op = 0.5 * (qops::identity(2) - z);
  auto at = [&](int site, const Matrix& op) -> Matrix {
    Matrix m = qops::kron(qops::identity(Eigen::Index(1) << (site - 1)), op);
    return qops::kron(m, qops::identity(Eigen::Index(1) << (n_sites - site)));
  };
  auto basis = std::make_shared<DeviceBasis>();
  const Eigen::Index d = Eigen::Index(1) << n_sites;
  basis->sum_x = Matrix::Zero(d, d);
  basis->sum_n = Matrix::Zero(d, d);
  for (int i = 1; i <= n_sites; ++i) {
    basis->sum_x += at(i, x);
    basis->sum_n += at(i, n_op);
  }
  for (int i = 1; i < n_sites; ++i)
    basis->bonds.push_back(at(i, n_op) * at(i + 1, n_op));
  return basis;
}

DeviceHamiltonian DeviceHamiltonian::create(int n_sites, PulseParams pulses) {
  DeviceHamiltonian dev;
  dev.n_sites = n_sites;
  dev.pulses = std::move(pulses);
  dev.basis = DeviceBasis::make(n_sites);
  return dev;
}

Matrix rydberg_hamiltonian(const DeviceHamiltonian& dev, double t) {
  if (t < 0) throw std::invalid_argument("rydberg_hamiltonian: t must be >= 0");
  Matrix h = dev.pulses.omega(t) * dev.basis->sum_x -
             dev.pulses.delta(t) * dev.basis->sum_n;
  for (std::size_t i = 0; i < dev.basis->bonds.size(); ++i)
    h += dev.pulses.v_pair(static_cast<int>(i) + 1) * dev.basis->bonds[i];
  return h;
}

model::RelevantSet hem_apply(const model::RelevantSet& set,
                             const DeviceHamiltonian& dev) {
  if (dev.n_sites != set.n_sites)
    throw std::invalid_argument("hem_apply: size mismatch");
  model::RelevantSet out = set;
  out.is_virtual = true;
  out.hamiltonian = {};
  out.hamiltonian_t = [dev](double t) { return rydberg_hamiltonian(dev, t); };
  return out;
}

model::TimeDependentH grow_device(const model::TimeDependentH& dev_h,
                                  int dev_sites, const model::ModelSpec& spec,
                                  int l) {
  if (l < 1) throw std::invalid_argument("grow_device: l must be >= 1");
  const Eigen::Index d = Eigen::Index(1) << dev_sites;
  const Eigen::Index env_d = Eigen::Index(1) << l;
  const Matrix z = qops::pauli(qops::Pauli::Z).data;
  const Matrix boundary = qops::kron(qops::identity(d / 2), z);
  const Matrix conn = qops::kron(z, qops::identity(env_d / 2));

  Matrix fixed = qops::kron(boundary, conn) +
                 qops::kron(qops::identity(d),
                            model::tfim_hamiltonian(l, spec.h).data);
  auto fixed_ptr = std::make_shared<const Matrix>(std::move(fixed));
  return [dev_h, fixed_ptr, env_d](double t) -> Matrix {
    return qops::kron(dev_h(t), qops::identity(env_d)) + *fixed_ptr;
  };
}

double pulse_duration_estimate(int k, int checkpoints, double total_time,
                               double boundary_norm, double c_theta) {
  if (k < 1) throw std::invalid_argument("pulse_duration_estimate: k >= 1");
  if (checkpoints < 1)
    throw std::invalid_argument("pulse_duration_estimate: M >= 1");
  const double m = static_cast<double>(checkpoints);
  return c_theta * boundary_norm *
         (2.0 + (k - 1) * (1.0 + m) / m) * total_time;
}

double shot_count_estimate(int batch, int growing_steps,
                           double shots_per_expectation, int n_params,
                           int order) {
  return static_cast<double>(batch) * growing_steps * shots_per_expectation *
         n_params * std::pow(2.0, order + 1);
}

std::string pulse_schedule_csv(const PulseParams& pulses, int n_sites,
                               double t_max, int samples) {
  if (samples < 2)
    throw std::invalid_argument("pulse_schedule_csv: need >= 2 samples");
  std::string out = "t,omega,delta";
  for (int i = 1; i < n_sites; ++i)
    out += ",v" + std::to_string(i);
  out += "\n";
  char buf[64];
  auto put = [&](double v, char sep) {
    std::snprintf(buf, sizeof(buf), "%.17g%c", v, sep);
    out += buf;
  };
  for (int s = 0; s < samples; ++s) {
    const double t = t_max * s / (samples - 1);
    put(t, ',');
    put(pulses.omega(t), ',');
    put(pulses.delta(t), n_sites > 1 ? ',' : '\n');
    for (int i = 1; i < n_sites; ++i)
      put(pulses.v_pair(i), i + 1 < n_sites ? ',' : '\n');
  }
  return out;
}

}  // namespace olrg::hem
