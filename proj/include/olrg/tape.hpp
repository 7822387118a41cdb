#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "olrg/types.hpp"

namespace olrg::ad {

/// Define-by-run reverse-mode tape over real dense matrices. Scalars are 1x1.
/// Complex arithmetic is composed from explicit (re, im) pairs via the Cx
/// helpers below, so every backward rule is plain real calculus.
///
/// Values are computed eagerly at node creation; backward() runs one reverse
/// sweep and accumulates parameter gradients into a flat vector matching the
/// parameter vector handed to the constructor.
class Tape {
 public:
  using Id = std::int32_t;

  explicit Tape(const std::vector<double>* params = nullptr)
      : params_(params) {}

  Id constant(RealMatrix value);
  Id zeros(int rows, int cols);  // deduplicated zero constants
  /// Row-major view of params[offset .. offset + rows*cols).
  Id parameter(int offset, int rows, int cols);

  Id matmul(Id a, Id b);
  Id add(Id a, Id b);
  Id sub(Id a, Id b);
  Id hadamard(Id a, Id b);
  Id scale(Id a, double s);
  Id transpose(Id a);
  Id kron(Id a, Id b);
  Id block(Id a, int r0, int c0, int rows, int cols);
  Id vstack(Id a, Id b);
  Id hstack(Id a, Id b);
  Id reshape_rowmajor(Id a, int rows, int cols);
  Id relu(Id a);
  Id trace(Id a);
  Id sqrt_scalar(Id a);
  Id exp_scalar(Id a);
  Id mul_scalar(Id a, Id s);  // broadcast multiply by a 1x1 node
  Id div_scalar(Id a, Id s);

  bool is_zero(Id id) const { return nodes_[id].zero; }
  const RealMatrix& value(Id id) const { return nodes_[id].val; }
  std::size_t node_count() const { return nodes_.size(); }

  /// root must be 1x1. param_grad must have the size of the parameter vector;
  /// gradients are accumulated (+=).
  void backward(Id root, std::vector<double>& param_grad) const;

 private:
  enum class Op : std::uint8_t {
    constant, parameter, matmul, add, sub, hadamard, scale, transpose, kron,
    block, vstack, hstack, reshape, relu, trace, sqrt_s, exp_s, mul_s, div_s,
  };

  struct Node {
    Op op;
    Id a = -1, b = -1;
    RealMatrix val;
    double aux = 0.0;
    int i0 = 0, i1 = 0, i2 = 0, i3 = 0;
    bool zero = false;
  };

  Id push(Node n);

  std::vector<Node> nodes_;
  std::map<std::pair<int, int>, Id> zero_cache_;
  std::map<std::tuple<int, int, int>, Id> param_cache_;
  const std::vector<double>* params_;
};

/// Complex value as a (re, im) pair of tape nodes.
struct Cx {
  Tape::Id re = -1;
  Tape::Id im = -1;
};

Cx cx_constant(Tape& t, const Matrix& v);
Cx cx_from_real(Tape& t, Tape::Id re);
Matrix cx_value(const Tape& t, Cx a);

Cx cx_add(Tape& t, Cx a, Cx b);
Cx cx_sub(Tape& t, Cx a, Cx b);
Cx cx_matmul(Tape& t, Cx a, Cx b);
Cx cx_adjoint(Tape& t, Cx a);
Cx cx_kron(Tape& t, Cx a, Cx b);
Cx cx_scale(Tape& t, Cx a, Complex s);
Cx cx_trace(Tape& t, Cx a);
/// AB + sigma * BA.
Cx cx_ad(Tape& t, Cx a, int sigma, Cx b);
/// u^dag x u.
Cx cx_conj_by(Tape& t, Cx u, Cx x);
/// |z| for a 1x1 complex value.
Tape::Id cx_abs(Tape& t, Cx a);
/// exp(A) by scaling-and-squaring with a fixed-order Taylor polynomial; the
/// scaling power is chosen from the current value.
Cx cx_expm_taylor(Tape& t, Cx a);

/// Differentiable mirror of qops::thin_qr_isometry: modified Gram-Schmidt
/// with two passes, R_jj >= 0 gauge and canonical-basis completion for
/// numerically dependent columns (those completion columns are constants).
Cx cx_thin_qr(Tape& t, Cx m);

}  // namespace olrg::ad
