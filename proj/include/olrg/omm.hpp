#pragma once

#include <cstdint>
#include <vector>

#include "olrg/model.hpp"
#include "olrg/nn.hpp"
#include "olrg/qops.hpp"

namespace olrg::omm {

/// Noise-conditioned network that emits an isometry: flatten the operator
/// matrix (real and imaginary parts), append a Gaussian noise vector, run the
/// network, fold the output into a d_big x d_small complex matrix and take its
/// thin QR factor.
struct OMMParams {
  int d_big = 0;
  int d_small = 0;
  int noise_dim = 8;
  int ensemble_size = 10;
  nn::Shape net;
  nn::Layout layout;
  std::vector<double> theta;

  /// width = 0 picks the input width for the hidden layers.
  static OMMParams create(int d_big, int d_small, int depth, int width,
                          int noise_dim, int ensemble_size,
                          std::uint64_t seed);
};

/// [vec Re(x); vec Im(x); noise], row-major flattening.
RealVector pack_input(const Matrix& x, const RealVector& noise);

/// Splits the network output into Re | Im halves and reshapes row-major.
Matrix fold_output(const RealVector& out, int d_big, int d_small);

qops::Isometry omm_forward(const OMMParams& params, const qops::DenseOperator& x,
                           const RealVector& noise);

/// V^dag X V applied to every member; flags the result virtual. The site
/// count is unchanged (compression only shrinks the working dimension).
model::RelevantSet conjugate_set(const model::RelevantSet& set, const Matrix& v);

/// One isometry computed from the Hamiltonian member, applied to the whole set.
model::RelevantSet omm_apply(const OMMParams& params,
                             const model::RelevantSet& set,
                             const RealVector& noise);

/// ensemble_size independent noise draws -> independent virtual sets.
std::vector<model::RelevantSet> ensemble_apply(const OMMParams& params,
                                               const model::RelevantSet& set,
                                               Rng& rng);

}  // namespace olrg::omm
