#pragma once

#include <span>
#include <vector>

#include "olrg/types.hpp"

namespace olrg::qops {

/// Dense complex square operator with an advisory hermiticity flag.
struct DenseOperator {
  Matrix data;
  bool hermitian_hint = false;

  Eigen::Index dim() const { return data.rows(); }
};

/// Column-orthonormal d_in x d_out matrix, d_out <= d_in.
struct Isometry {
  Matrix data;

  Eigen::Index in_dim() const { return data.rows(); }
  Eigen::Index out_dim() const { return data.cols(); }
};

enum class Pauli { I, X, Y, Z };

DenseOperator pauli(Pauli p);
/// Accepts the labels 'I', 'X', 'Y', 'Z'; anything else is an input error.
DenseOperator pauli(char label);

Matrix identity(Eigen::Index d);

Matrix kron(const Matrix& a, const Matrix& b);
/// Tensor product in list order; throws on an empty list.
DenseOperator kron(std::span<const DenseOperator> ops);

/// AB + sigma * BA with sigma in {-1, +1} (commutator / anti-commutator).
Matrix adjoint_apply(const Matrix& a, int sigma, const Matrix& b);
DenseOperator adjoint_apply(const DenseOperator& a, int sigma,
                            const DenseOperator& b);

/// Thin QR with the gauge fixed so R has a non-negative real diagonal.
/// Columns that are (numerically) linearly dependent are replaced by
/// Gram-Schmidt completion against canonical basis vectors in index order,
/// making this a total, deterministic function of the input.
Isometry thin_qr_isometry(const Matrix& m);

bool is_hermitian(const Matrix& m, double tol = 1e-12);

}  // namespace olrg::qops
