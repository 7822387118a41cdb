#include "olrg/qops.hpp"

#include <stdexcept>

namespace olrg::qops {

DenseOperator pauli(Pauli p) {
  Matrix m(2, 2);
  switch (p) {
    case Pauli::I:
      m << 1, 0, 0, 1;
      break;
    case Pauli::X:
      m << 0, 1, 1, 0;
      break;
    case Pauli::Y:
      m << 0, Complex(0, -1), Complex(0, 1), 0;
      break;
    case Pauli::Z:
      m << 1, 0, 0, -1;
      break;
  }
  return {std::move(m), true};
}

DenseOperator pauli(char label) {
  switch (label) {
    case 'I':
      return pauli(Pauli::I);
    case 'X':
      return pauli(Pauli::X);
    case 'Y':
      return pauli(Pauli::Y);
    case 'Z':
      return pauli(Pauli::Z);
    default:
      throw std::invalid_argument(std::string("unknown Pauli label: ") + label);
  }
}

Matrix identity(Eigen::Index d) { return Matrix::Identity(d, d); }

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

DenseOperator kron(std::span<const DenseOperator> ops) {
  if (ops.empty()) throw std::invalid_argument("kron: empty operator list");
  Matrix out = ops.front().data;
  bool herm = ops.front().hermitian_hint;
  for (std::size_t i = 1; i < ops.size(); ++i) {
    out = kron(out, ops[i].data);
    herm = herm && ops[i].hermitian_hint;
  }
  return {std::move(out), herm};
}

Matrix adjoint_apply(const Matrix& a, int sigma, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("adjoint_apply: dimension mismatch");
  if (sigma != 1 && sigma != -1)
    throw std::invalid_argument("adjoint_apply: sigma must be +1 or -1");
  return a * b + static_cast<double>(sigma) * (b * a);
}

DenseOperator adjoint_apply(const DenseOperator& a, int sigma,
                            const DenseOperator& b) {
  // {A, B} of Hermitian operators is Hermitian; [A, B] is anti-Hermitian.
  const bool herm = sigma == 1 && a.hermitian_hint && b.hermitian_hint;
  return {adjoint_apply(a.data, sigma, b.data), herm};
}

Isometry thin_qr_isometry(const Matrix& m) {
  const Eigen::Index rows = m.rows();
  const Eigen::Index cols = m.cols();
  if (cols > rows)
    throw std::invalid_argument("thin_qr_isometry: more columns than rows");

  Matrix q(rows, cols);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double dep_tol = 1e-12 * scale * static_cast<double>(rows);

  auto orthogonalize = [&](Eigen::VectorXcd& v, Eigen::Index upto) {
    // Two Gram-Schmidt passes keep orthogonality at machine precision.
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index i = 0; i < upto; ++i)
        v -= (q.col(i).adjoint() * v)(0) * q.col(i);
  };

  Eigen::Index next_canonical = 0;
  for (Eigen::Index j = 0; j < cols; ++j) {
    Eigen::VectorXcd v = m.col(j);
    orthogonalize(v, j);
    const double nrm = v.norm();
    if (nrm > dep_tol) {
      // Normalizing by the (real, positive) residual norm is exactly the
      // R_jj >= 0 gauge.
      q.col(j) = v / nrm;
      continue;
    }
    while (true) {
      if (next_canonical >= rows)
        throw std::runtime_error("thin_qr_isometry: basis completion exhausted");
      Eigen::VectorXcd e = Eigen::VectorXcd::Zero(rows);
      e(next_canonical++) = 1.0;
      orthogonalize(e, j);
      const double enrm = e.norm();
      if (enrm > 1e-8) {
        q.col(j) = e / enrm;
        break;
      }
    }
  }
  return {std::move(q)};
}

bool is_hermitian(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace olrg::qops
