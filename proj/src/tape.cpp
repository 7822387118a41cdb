#include "olrg/tape.hpp"

#include <cmath>
#include <stdexcept>

namespace olrg::ad {

Tape::Id Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  return static_cast<Id>(nodes_.size() - 1);
}

Tape::Id Tape::constant(RealMatrix value) {
  Node n{Op::constant};
  n.zero = value.size() > 0 && value.isZero(0.0);
  n.val = std::move(value);
  return push(std::move(n));
}

Tape::Id Tape::zeros(int rows, int cols) {
  const auto key = std::make_pair(rows, cols);
  auto it = zero_cache_.find(key);
  if (it != zero_cache_.end()) return it->second;
  Node n{Op::constant};
  n.val = RealMatrix::Zero(rows, cols);
  n.zero = true;
  const Id id = push(std::move(n));
  zero_cache_.emplace(key, id);
  return id;
}

Tape::Id Tape::parameter(int offset, int rows, int cols) {
  if (!params_) throw std::logic_error("Tape: no parameter vector bound");
  const auto key = std::make_tuple(offset, rows, cols);
  auto it = param_cache_.find(key);
  if (it != param_cache_.end()) return it->second;
  Node n{Op::parameter};
  n.i0 = offset;
  n.val.resize(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      n.val(r, c) = (*params_)[offset + r * cols + c];
  const Id id = push(std::move(n));
  param_cache_.emplace(key, id);
  return id;
}

Tape::Id Tape::matmul(Id a, Id b) {
  if (nodes_[a].zero || nodes_[b].zero)
    return zeros(static_cast<int>(nodes_[a].val.rows()),
                 static_cast<int>(nodes_[b].val.cols()));
  Node n{Op::matmul, a, b};
  n.val = nodes_[a].val * nodes_[b].val;
  return push(std::move(n));
}

Tape::Id Tape::add(Id a, Id b) {
  if (nodes_[a].zero) return b;
  if (nodes_[b].zero) return a;
  Node n{Op::add, a, b};
  n.val = nodes_[a].val + nodes_[b].val;
  return push(std::move(n));
}

Tape::Id Tape::sub(Id a, Id b) {
  if (nodes_[b].zero) return a;
  if (nodes_[a].zero) return scale(b, -1.0);
  Node n{Op::sub, a, b};
  n.val = nodes_[a].val - nodes_[b].val;
  return push(std::move(n));
}

Tape::Id Tape::hadamard(Id a, Id b) {
  if (nodes_[a].zero || nodes_[b].zero)
    return zeros(static_cast<int>(nodes_[a].val.rows()),
                 static_cast<int>(nodes_[a].val.cols()));
  Node n{Op::hadamard, a, b};
  n.val = nodes_[a].val.cwiseProduct(nodes_[b].val);
  return push(std::move(n));
}

Tape::Id Tape::scale(Id a, double s) {
  if (nodes_[a].zero || s == 0.0)
    return zeros(static_cast<int>(nodes_[a].val.rows()),
                 static_cast<int>(nodes_[a].val.cols()));
  if (s == 1.0) return a;
  Node n{Op::scale, a};
  n.aux = s;
  n.val = s * nodes_[a].val;
  return push(std::move(n));
}

Tape::Id Tape::transpose(Id a) {
  if (nodes_[a].zero)
    return zeros(static_cast<int>(nodes_[a].val.cols()),
                 static_cast<int>(nodes_[a].val.rows()));
  Node n{Op::transpose, a};
  n.val = nodes_[a].val.transpose();
  return push(std::move(n));
}

Tape::Id Tape::kron(Id a, Id b) {
  const auto& av = nodes_[a].val;
  const auto& bv = nodes_[b].val;
  if (nodes_[a].zero || nodes_[b].zero)
    return zeros(static_cast<int>(av.rows() * bv.rows()),
                 static_cast<int>(av.cols() * bv.cols()));
  Node n{Op::kron, a, b};
  n.val.resize(av.rows() * bv.rows(), av.cols() * bv.cols());
  for (Eigen::Index i = 0; i < av.rows(); ++i)
    for (Eigen::Index j = 0; j < av.cols(); ++j)
      n.val.block(i * bv.rows(), j * bv.cols(), bv.rows(), bv.cols()) =
          av(i, j) * bv;
  return push(std::move(n));
}

Tape::Id Tape::block(Id a, int r0, int c0, int rows, int cols) {
  if (nodes_[a].zero) return zeros(rows, cols);
  Node n{Op::block, a};
  n.i0 = r0;
  n.i1 = c0;
  n.val = nodes_[a].val.block(r0, c0, rows, cols);
  return push(std::move(n));
}

Tape::Id Tape::vstack(Id a, Id b) {
  Node n{Op::vstack, a, b};
  const auto& av = nodes_[a].val;
  const auto& bv = nodes_[b].val;
  n.val.resize(av.rows() + bv.rows(), av.cols());
  n.val.topRows(av.rows()) = av;
  n.val.bottomRows(bv.rows()) = bv;
  return push(std::move(n));
}

Tape::Id Tape::hstack(Id a, Id b) {
  Node n{Op::hstack, a, b};
  const auto& av = nodes_[a].val;
  const auto& bv = nodes_[b].val;
  n.val.resize(av.rows(), av.cols() + bv.cols());
  n.val.leftCols(av.cols()) = av;
  n.val.rightCols(bv.cols()) = bv;
  return push(std::move(n));
}

Tape::Id Tape::reshape_rowmajor(Id a, int rows, int cols) {
  const auto& av = nodes_[a].val;
  if (av.size() != Eigen::Index(rows) * cols)
    throw std::invalid_argument("reshape: size mismatch");
  if (nodes_[a].zero) return zeros(rows, cols);
  Node n{Op::reshape, a};
  n.val.resize(rows, cols);
  Eigen::Index k = 0;
  for (Eigen::Index r = 0; r < av.rows(); ++r)
    for (Eigen::Index c = 0; c < av.cols(); ++c, ++k)
      n.val(k / cols, k % cols) = av(r, c);
  return push(std::move(n));
}

Tape::Id Tape::relu(Id a) {
  if (nodes_[a].zero) return a;
  Node n{Op::relu, a};
  n.val = nodes_[a].val.cwiseMax(0.0);
  return push(std::move(n));
}

Tape::Id Tape::trace(Id a) {
  if (nodes_[a].zero) return zeros(1, 1);
  Node n{Op::trace, a};
  n.val.resize(1, 1);
  n.val(0, 0) = nodes_[a].val.trace();
  return push(std::move(n));
}

Tape::Id Tape::sqrt_scalar(Id a) {
  Node n{Op::sqrt_s, a};
  n.val.resize(1, 1);
  n.val(0, 0) = std::sqrt(nodes_[a].val(0, 0));
  return push(std::move(n));
}

Tape::Id Tape::exp_scalar(Id a) {
  Node n{Op::exp_s, a};
  n.val.resize(1, 1);
  n.val(0, 0) = std::exp(nodes_[a].val(0, 0));
  return push(std::move(n));
}

Tape::Id Tape::mul_scalar(Id a, Id s) {
  if (nodes_[a].zero || nodes_[s].zero)
    return zeros(static_cast<int>(nodes_[a].val.rows()),
                 static_cast<int>(nodes_[a].val.cols()));
  Node n{Op::mul_s, a, s};
  n.val = nodes_[a].val * nodes_[s].val(0, 0);
  return push(std::move(n));
}

Tape::Id Tape::div_scalar(Id a, Id s) {
  if (nodes_[a].zero) return a;
  Node n{Op::div_s, a, s};
  n.val = nodes_[a].val / nodes_[s].val(0, 0);
  return push(std::move(n));
}

void Tape::backward(Id root, std::vector<double>& param_grad) const {
  if (nodes_[root].val.size() != 1)
    throw std::invalid_argument("backward: root must be a scalar");

  std::vector<RealMatrix> grads(nodes_.size());
  auto acc = [&](Id id, const RealMatrix& g) {
    if (grads[id].size() == 0)
      grads[id] = g;
    else
      grads[id] += g;
  };
  grads[root] = RealMatrix::Ones(1, 1);

  for (Id i = root; i >= 0; --i) {
    if (grads[i].size() == 0) continue;
    const Node& n = nodes_[i];
    const RealMatrix& g = grads[i];
    switch (n.op) {
      case Op::constant:
        break;
      case Op::parameter: {
        const int cols = static_cast<int>(n.val.cols());
        for (int r = 0; r < n.val.rows(); ++r)
          for (int c = 0; c < cols; ++c)
            param_grad[n.i0 + r * cols + c] += g(r, c);
        break;
      }
      case Op::matmul:
        acc(n.a, g * nodes_[n.b].val.transpose());
        acc(n.b, nodes_[n.a].val.transpose() * g);
        break;
      case Op::add:
        acc(n.a, g);
        acc(n.b, g);
        break;
      case Op::sub:
        acc(n.a, g);
        acc(n.b, -g);
        break;
      case Op::hadamard:
        acc(n.a, g.cwiseProduct(nodes_[n.b].val));
        acc(n.b, g.cwiseProduct(nodes_[n.a].val));
        break;
      case Op::scale:
        acc(n.a, n.aux * g);
        break;
      case Op::transpose:
        acc(n.a, g.transpose());
        break;
      case Op::kron: {
        const auto& av = nodes_[n.a].val;
        const auto& bv = nodes_[n.b].val;
        RealMatrix ga = RealMatrix::Zero(av.rows(), av.cols());
        RealMatrix gb = RealMatrix::Zero(bv.rows(), bv.cols());
        for (Eigen::Index r = 0; r < av.rows(); ++r)
          for (Eigen::Index c = 0; c < av.cols(); ++c) {
            const auto gblk = g.block(r * bv.rows(), c * bv.cols(), bv.rows(),
                                      bv.cols());
            ga(r, c) = gblk.cwiseProduct(bv).sum();
            gb += av(r, c) * gblk;
          }
        acc(n.a, ga);
        acc(n.b, gb);
        break;
      }
      case Op::block: {
        RealMatrix ga = RealMatrix::Zero(nodes_[n.a].val.rows(),
                                         nodes_[n.a].val.cols());
        ga.block(n.i0, n.i1, g.rows(), g.cols()) = g;
        acc(n.a, ga);
        break;
      }
      case Op::vstack: {
        const auto ar = nodes_[n.a].val.rows();
        acc(n.a, g.topRows(ar));
        acc(n.b, g.bottomRows(g.rows() - ar));
        break;
      }
      case Op::hstack: {
        const auto ac = nodes_[n.a].val.cols();
        acc(n.a, g.leftCols(ac));
        acc(n.b, g.rightCols(g.cols() - ac));
        break;
      }
      case Op::reshape: {
        const auto& av = nodes_[n.a].val;
        RealMatrix ga(av.rows(), av.cols());
        Eigen::Index k = 0;
        const Eigen::Index cols = g.cols();
        for (Eigen::Index r = 0; r < av.rows(); ++r)
          for (Eigen::Index c = 0; c < av.cols(); ++c, ++k)
            ga(r, c) = g(k / cols, k % cols);
        acc(n.a, ga);
        break;
      }
      case Op::relu: {
        const auto& av = nodes_[n.a].val;
        acc(n.a, (av.array() > 0.0).select(g, RealMatrix::Zero(g.rows(), g.cols())));
        break;
      }
      case Op::trace: {
        const auto d = nodes_[n.a].val.rows();
        acc(n.a, RealMatrix(g(0, 0) * RealMatrix::Identity(d, d)));
        break;
      }
      case Op::sqrt_s: {
        RealMatrix ga(1, 1);
        const double v = n.val(0, 0);
        ga(0, 0) = v < 1e-150 ? 0.0 : g(0, 0) / (2.0 * v);
        acc(n.a, ga);
        break;
      }
      case Op::exp_s: {
        RealMatrix ga(1, 1);
        ga(0, 0) = g(0, 0) * n.val(0, 0);
        acc(n.a, ga);
        break;
      }
      case Op::mul_s: {
        acc(n.a, RealMatrix(g * nodes_[n.b].val(0, 0)));
        RealMatrix gs(1, 1);
        gs(0, 0) = g.cwiseProduct(nodes_[n.a].val).sum();
        acc(n.b, gs);
        break;
      }
      case Op::div_s: {
        const double s = nodes_[n.b].val(0, 0);
        acc(n.a, RealMatrix(g / s));
        RealMatrix gs(1, 1);
        gs(0, 0) = -g.cwiseProduct(n.val).sum() / s;
        acc(n.b, gs);
        break;
      }
    }
    grads[i].resize(0, 0);  // release as we go
  }
}

// ---------------------------------------------------------------------------
// Complex composites
// ---------------------------------------------------------------------------

Cx cx_constant(Tape& t, const Matrix& v) {
  RealMatrix re = v.real();
  RealMatrix im = v.imag();
  const bool im_zero = im.isZero(0.0);
  Cx out;
  out.re = t.constant(std::move(re));
  out.im = im_zero ? t.zeros(static_cast<int>(v.rows()),
                             static_cast<int>(v.cols()))
                   : t.constant(std::move(im));
  return out;
}

Cx cx_from_real(Tape& t, Tape::Id re) {
  return {re, t.zeros(static_cast<int>(t.value(re).rows()),
                      static_cast<int>(t.value(re).cols()))};
}

Matrix cx_value(const Tape& t, Cx a) {
  Matrix out(t.value(a.re).rows(), t.value(a.re).cols());
  out.real() = t.value(a.re);
  out.imag() = t.value(a.im);
  return out;
}

Cx cx_add(Tape& t, Cx a, Cx b) { return {t.add(a.re, b.re), t.add(a.im, b.im)}; }

Cx cx_sub(Tape& t, Cx a, Cx b) { return {t.sub(a.re, b.re), t.sub(a.im, b.im)}; }

Cx cx_matmul(Tape& t, Cx a, Cx b) {
  Cx out;
  out.re = t.sub(t.matmul(a.re, b.re), t.matmul(a.im, b.im));
  out.im = t.add(t.matmul(a.re, b.im), t.matmul(a.im, b.re));
  return out;
}

Cx cx_adjoint(Tape& t, Cx a) {
  return {t.transpose(a.re), t.scale(t.transpose(a.im), -1.0)};
}

Cx cx_kron(Tape& t, Cx a, Cx b) {
  Cx out;
  out.re = t.sub(t.kron(a.re, b.re), t.kron(a.im, b.im));
  out.im = t.add(t.kron(a.re, b.im), t.kron(a.im, b.re));
  return out;
}

Cx cx_scale(Tape& t, Cx a, Complex s) {
  if (s.imag() == 0.0) return {t.scale(a.re, s.real()), t.scale(a.im, s.real())};
  Cx out;
  out.re = t.sub(t.scale(a.re, s.real()), t.scale(a.im, s.imag()));
  out.im = t.add(t.scale(a.re, s.imag()), t.scale(a.im, s.real()));
  return out;
}

Cx cx_trace(Tape& t, Cx a) { return {t.trace(a.re), t.trace(a.im)}; }

Cx cx_ad(Tape& t, Cx a, int sigma, Cx b) {
  const Cx ab = cx_matmul(t, a, b);
  const Cx ba = cx_matmul(t, b, a);
  return sigma > 0 ? cx_add(t, ab, ba) : cx_sub(t, ab, ba);
}

Cx cx_conj_by(Tape& t, Cx u, Cx x) {
  return cx_matmul(t, cx_adjoint(t, u), cx_matmul(t, x, u));
}

Tape::Id cx_abs(Tape& t, Cx a) {
  const Tape::Id sq =
      t.add(t.hadamard(a.re, a.re), t.hadamard(a.im, a.im));
  return t.sqrt_scalar(sq);
}

Cx cx_expm_taylor(Tape& t, Cx a) {
  const Eigen::Index d = t.value(a.re).rows();
  // 1-norm of the current value picks the scaling power.
  const RealMatrix abs_sum =
      t.value(a.re).cwiseAbs() + t.value(a.im).cwiseAbs();
  const double norm1 = abs_sum.colwise().sum().maxCoeff();
  int s = 0;
  if (norm1 > 0.25) s = static_cast<int>(std::ceil(std::log2(norm1 / 0.25)));

  Cx x = cx_scale(t, a, Complex(std::pow(0.5, s), 0.0));
  const Cx eye = cx_constant(t, Matrix::Identity(d, d));

  constexpr int kOrder = 13;
  Cx p = eye;
  for (int k = kOrder; k >= 1; --k)
    p = cx_add(t, eye, cx_scale(t, cx_matmul(t, x, p), Complex(1.0 / k, 0.0)));
  for (int k = 0; k < s; ++k) p = cx_matmul(t, p, p);
  return p;
}

Cx cx_thin_qr(Tape& t, Cx m) {
  const int rows = static_cast<int>(t.value(m.re).rows());
  const int cols = static_cast<int>(t.value(m.re).cols());
  if (cols > rows)
    throw std::invalid_argument("cx_thin_qr: more columns than rows");

  const double max_abs = std::max(
      1.0, (t.value(m.re).cwiseAbs() + t.value(m.im).cwiseAbs()).maxCoeff());
  const double dep_tol = 1e-12 * max_abs * rows;

  std::vector<Cx> q_cols;
  // q_i^dag v, then v -= c * q_i, twice per column.
  auto project_out = [&](Cx v) -> Cx {
    for (int pass = 0; pass < 2; ++pass)
      for (const Cx& q : q_cols) {
        Cx c;
        c.re = t.add(t.matmul(t.transpose(q.re), v.re),
                     t.matmul(t.transpose(q.im), v.im));
        c.im = t.sub(t.matmul(t.transpose(q.re), v.im),
                     t.matmul(t.transpose(q.im), v.re));
        const Tape::Id pr =
            t.sub(t.mul_scalar(q.re, c.re), t.mul_scalar(q.im, c.im));
        const Tape::Id pi =
            t.add(t.mul_scalar(q.im, c.re), t.mul_scalar(q.re, c.im));
        v = {t.sub(v.re, pr), t.sub(v.im, pi)};
      }
    return v;
  };
  auto norm_of = [&](Cx v) -> Tape::Id {
    return t.sqrt_scalar(t.add(t.matmul(t.transpose(v.re), v.re),
                               t.matmul(t.transpose(v.im), v.im)));
  };

  int next_canonical = 0;
  for (int j = 0; j < cols; ++j) {
    Cx v = {t.block(m.re, 0, j, rows, 1), t.block(m.im, 0, j, rows, 1)};
    v = project_out(v);
    const Tape::Id nrm = norm_of(v);
    if (t.value(nrm)(0, 0) > dep_tol) {
      q_cols.push_back({t.div_scalar(v.re, nrm), t.div_scalar(v.im, nrm)});
      continue;
    }
    while (true) {
      if (next_canonical >= rows)
        throw std::runtime_error("cx_thin_qr: basis completion exhausted");
      RealMatrix e = RealMatrix::Zero(rows, 1);
      e(next_canonical++, 0) = 1.0;
      Cx ev = cx_from_real(t, t.constant(std::move(e)));
      ev = project_out(ev);
      const Tape::Id enrm = norm_of(ev);
      if (t.value(enrm)(0, 0) > 1e-8) {
        q_cols.push_back(
            {t.div_scalar(ev.re, enrm), t.div_scalar(ev.im, enrm)});
        break;
      }
    }
  }

  Cx out = q_cols.front();
  for (std::size_t i = 1; i < q_cols.size(); ++i)
    out = {t.hstack(out.re, q_cols[i].re), t.hstack(out.im, q_cols[i].im)};
  return out;
}

}  // namespace olrg::ad
