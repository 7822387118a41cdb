#include <doctest.h>

#include "olrg/qops.hpp"
#include "olrg/rng.hpp"

using namespace olrg;
using qops::DenseOperator;

namespace {

Matrix random_complex(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = Complex(rng.normal(), rng.normal());
  return m;
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE_BEGIN("qops");

TEST_CASE("pauli matrices") {
  const Matrix x = qops::pauli('X').data;
  CHECK(x(0, 1) == Complex(1.0));
  CHECK(x(1, 0) == Complex(1.0));
  CHECK(x(0, 0) == Complex(0.0));

  const Matrix z = qops::pauli('Z').data;
  CHECK(z(0, 0) == Complex(1.0));
  CHECK(z(1, 1) == Complex(-1.0));

  CHECK(max_abs(qops::pauli('I').data - qops::identity(2)) == 0.0);
  CHECK(qops::pauli('Y').hermitian_hint);
  CHECK_THROWS_AS(qops::pauli('Q'), std::invalid_argument);
}

TEST_CASE("kron basics") {
  const auto i2 = qops::pauli(qops::Pauli::I);
  const auto z = qops::pauli(qops::Pauli::Z);
  const auto x = qops::pauli(qops::Pauli::X);

  std::vector<DenseOperator> ops{i2, i2};
  CHECK(max_abs(qops::kron(ops).data - qops::identity(4)) == 0.0);

  ops = {z, z};
  Matrix zz = qops::kron(ops).data;
  CHECK(zz(0, 0) == Complex(1.0));
  CHECK(zz(1, 1) == Complex(-1.0));
  CHECK(zz(2, 2) == Complex(-1.0));
  CHECK(zz(3, 3) == Complex(1.0));

  // X on the first site flips |00> to |10>.
  ops = {x, i2};
  Eigen::VectorXcd basis = Eigen::VectorXcd::Zero(4);
  basis(0) = 1.0;
  Eigen::VectorXcd flipped = qops::kron(ops).data * basis;
  CHECK(std::abs(flipped(2) - Complex(1.0)) < 1e-15);

  CHECK_THROWS_AS(qops::kron(std::span<const DenseOperator>{}),
                  std::invalid_argument);
}

TEST_CASE("adjoint_apply") {
  const Matrix x = qops::pauli('X').data;
  const Matrix y = qops::pauli('Y').data;
  const Matrix z = qops::pauli('Z').data;

  // [Z, X] = 2iY
  CHECK(max_abs(qops::adjoint_apply(z, -1, x) - Complex(0, 2) * y) < 1e-15);

  Rng rng(11);
  const Matrix a = random_complex(rng, 4, 4);
  CHECK(max_abs(qops::adjoint_apply(a, 1, Matrix(qops::identity(4))) - 2.0 * a) <
        1e-15);
  CHECK(max_abs(qops::adjoint_apply(Matrix(qops::identity(4)), -1, a)) < 1e-15);

  CHECK_THROWS_AS(qops::adjoint_apply(x, -1, Matrix(qops::identity(4))),
                  std::invalid_argument);
}

TEST_CASE("thin_qr_isometry contract") {
  CHECK(max_abs(qops::thin_qr_isometry(Matrix(qops::identity(4))).data -
                qops::identity(4)) == 0.0);
  CHECK(max_abs(qops::thin_qr_isometry(Matrix(2.0 * qops::identity(4))).data -
                qops::identity(4)) < 1e-15);

  Rng rng(3);
  const Matrix m = random_complex(rng, 8, 4);
  const Matrix v = qops::thin_qr_isometry(m).data;
  CHECK(max_abs(v.adjoint() * v - qops::identity(4)) < 1e-12);
  // Column span is preserved: projecting m onto the span leaves it unchanged.
  CHECK(max_abs(v * (v.adjoint() * m) - m) < 1e-12);
}

TEST_CASE("thin_qr_isometry determinism") {
  Rng rng(4);
  const Matrix m = random_complex(rng, 6, 3);
  const Matrix v1 = qops::thin_qr_isometry(m).data;
  const Matrix v2 = qops::thin_qr_isometry(m).data;
  CHECK(std::memcmp(v1.data(), v2.data(), sizeof(Complex) * v1.size()) == 0);
}

TEST_CASE("thin_qr_isometry rank-deficient completion") {
  const Matrix zero = Matrix::Zero(8, 4);
  const Matrix v = qops::thin_qr_isometry(zero).data;
  CHECK(max_abs(v - Matrix(Matrix::Identity(8, 8).leftCols(4))) == 0.0);

  // Two identical columns: the second is completed from the canonical basis.
  Rng rng(5);
  Matrix m = random_complex(rng, 5, 2);
  m.col(1) = m.col(0);
  const Matrix q = qops::thin_qr_isometry(m).data;
  CHECK(max_abs(q.adjoint() * q - qops::identity(2)) < 1e-10);
}

TEST_CASE("adjoint linearity") {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a1 = random_complex(rng, 3, 3);
    const Matrix a2 = random_complex(rng, 3, 3);
    const Matrix b = random_complex(rng, 3, 3);
    for (int s : {-1, 1}) {
      const Matrix lhs = qops::adjoint_apply(Matrix(a1 + a2), s, b);
      const Matrix rhs =
          qops::adjoint_apply(a1, s, b) + qops::adjoint_apply(a2, s, b);
      CHECK(max_abs(lhs - rhs) < 1e-12);
    }
  }
}

TEST_CASE("tensor-product adjoint identity") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix a = random_complex(rng, 2, 2), b = random_complex(rng, 2, 2);
    const Matrix x = random_complex(rng, 2, 2), y = random_complex(rng, 2, 2);
    for (int s : {-1, 1}) {
      const Matrix lhs =
          qops::adjoint_apply(qops::kron(a, b), s, qops::kron(x, y));
      Matrix rhs = Matrix::Zero(4, 4);
      for (int r : {-1, 1})
        rhs += qops::kron(qops::adjoint_apply(a, r, x),
                          qops::adjoint_apply(b, s * r, y));
      CHECK(max_abs(lhs - 0.5 * rhs) < 1e-10);

      // Iterated k = 2 form.
      const Matrix lhs2 = qops::adjoint_apply(qops::kron(a, b), s, lhs);
      Matrix rhs2 = Matrix::Zero(4, 4);
      for (int s1 : {-1, 1})
        for (int s2 : {-1, 1})
          rhs2 += qops::kron(
              qops::adjoint_apply(a, s1, qops::adjoint_apply(a, s2, x)),
              qops::adjoint_apply(b, s * s1,
                                  qops::adjoint_apply(b, s * s2, y)));
      CHECK(max_abs(lhs2 - 0.25 * rhs2) < 1e-10);
    }
  }

  // Concrete instance: ad_{ZxZ,-}(XxI) = 2i (YxZ).
  const Matrix z = qops::pauli('Z').data, x = qops::pauli('X').data;
  const Matrix y = qops::pauli('Y').data, eye = qops::identity(2);
  const Matrix lhs = qops::adjoint_apply(qops::kron(z, z), -1, qops::kron(x, eye));
  CHECK(max_abs(lhs - Complex(0, 2) * qops::kron(y, z)) < 1e-14);
  Matrix rhs = Matrix::Zero(4, 4);
  for (int r : {-1, 1})
    rhs += qops::kron(qops::adjoint_apply(z, r, x),
                      qops::adjoint_apply(z, -r, eye));
  CHECK(max_abs(0.5 * rhs - Complex(0, 2) * qops::kron(y, z)) < 1e-14);
}

TEST_CASE("adjoint power expansion") {
  Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const Matrix a1 = random_complex(rng, 2, 2);
    const Matrix a2 = random_complex(rng, 2, 2);
    const Matrix b = random_complex(rng, 2, 2);
    for (int s : {-1, 1}) {
      const Matrix sum = a1 + a2;
      const Matrix lhs =
          qops::adjoint_apply(sum, s, qops::adjoint_apply(sum, s, b));
      const Matrix rhs =
          qops::adjoint_apply(a1, s, qops::adjoint_apply(a1, s, b)) +
          qops::adjoint_apply(a1, s, qops::adjoint_apply(a2, s, b)) +
          qops::adjoint_apply(a2, s, qops::adjoint_apply(a1, s, b)) +
          qops::adjoint_apply(a2, s, qops::adjoint_apply(a2, s, b));
      CHECK(max_abs(lhs - rhs) < 1e-10);
    }
  }
}

TEST_SUITE_END();
