#include "olrg/omm.hpp"

#include <stdexcept>

namespace olrg::omm {

OMMParams OMMParams::create(int d_big, int d_small, int depth, int width,
                            int noise_dim, int ensemble_size,
                            std::uint64_t seed) {
  if (d_small > d_big)
    throw std::invalid_argument("OMMParams: d_small must be <= d_big");
  OMMParams p;
  p.d_big = d_big;
  p.d_small = d_small;
  p.noise_dim = noise_dim;
  p.ensemble_size = ensemble_size;
  p.net.in = 2 * d_big * d_big + noise_dim;
  const int hidden_width = width > 0 ? width : p.net.in;
  p.net.hidden.assign(depth, hidden_width);
  p.net.out = 2 * d_big * d_small;
  p.layout = nn::make_layout(p.net, 0);
  Rng rng(seed);
  p.theta.reserve(p.layout.size);
  nn::init_params(p.net, rng, p.theta);
  return p;
}

RealVector pack_input(const Matrix& x, const RealVector& noise) {
  const Eigen::Index d = x.rows();
  RealVector input(2 * d * d + noise.size());
  Eigen::Index k = 0;
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c, ++k) input(k) = x(r, c).real();
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c, ++k) input(k) = x(r, c).imag();
  input.tail(noise.size()) = noise;
  return input;
}

Matrix fold_output(const RealVector& out, int d_big, int d_small) {
  if (out.size() != Eigen::Index(2) * d_big * d_small)
    throw std::invalid_argument("fold_output: size mismatch");
  Matrix m(d_big, d_small);
  Eigen::Index k = 0;
  for (int r = 0; r < d_big; ++r)
    for (int c = 0; c < d_small; ++c, ++k)
      m(r, c) = Complex(out(k), out(d_big * d_small + k));
  return m;
}

qops::Isometry omm_forward(const OMMParams& params, const qops::DenseOperator& x,
                           const RealVector& noise) {
  if (x.dim() != params.d_big)
    throw std::invalid_argument("omm_forward: operator dimension mismatch");
  if (noise.size() != params.noise_dim)
    throw std::invalid_argument("omm_forward: noise dimension mismatch");
  const RealVector out = nn::forward(params.net, params.layout, params.theta,
                                     pack_input(x.data, noise));
  return qops::thin_qr_isometry(fold_output(out, params.d_big, params.d_small));
}

model::RelevantSet conjugate_set(const model::RelevantSet& set, const Matrix& v) {
  if (set.time_dependent())
    throw std::invalid_argument("conjugate_set: time-dependent set");
  auto conj = [&v](const qops::DenseOperator& x) -> qops::DenseOperator {
    return {v.adjoint() * x.data * v, x.hermitian_hint};
  };
  model::RelevantSet out;
  out.n_sites = set.n_sites;
  out.is_virtual = true;
  out.rho = conj(set.rho);
  out.hamiltonian = conj(set.hamiltonian);
  out.observable = conj(set.observable);
  out.boundary.reserve(set.boundary.size());
  for (const auto& b : set.boundary) out.boundary.push_back(conj(b));
  return out;
}

model::RelevantSet omm_apply(const OMMParams& params,
                             const model::RelevantSet& set,
                             const RealVector& noise) {
  const auto v = omm_forward(params, set.hamiltonian, noise);
  return conjugate_set(set, v.data);
}

std::vector<model::RelevantSet> ensemble_apply(const OMMParams& params,
                                               const model::RelevantSet& set,
                                               Rng& rng) {
  if (params.ensemble_size < 1)
    throw std::invalid_argument("ensemble_apply: ensemble_size must be >= 1");
  std::vector<model::RelevantSet> out;
  out.reserve(params.ensemble_size);
  for (int z = 0; z < params.ensemble_size; ++z) {
    RealVector noise(params.noise_dim);
    for (int i = 0; i < params.noise_dim; ++i) noise(i) = rng.normal();
    out.push_back(omm_apply(params, set, noise));
  }
  return out;
}

}  // namespace olrg::omm
