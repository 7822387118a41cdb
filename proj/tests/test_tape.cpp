#include <doctest.h>

#include <functional>

#include "olrg/dynamics.hpp"
#include "olrg/qops.hpp"
#include "olrg/rng.hpp"
#include "olrg/tape.hpp"

using namespace olrg;
using ad::Cx;
using ad::Tape;

namespace {

// Central-difference check of d(scalar)/d(theta) against backward().
void fd_check(const std::function<Tape::Id(Tape&)>& build,
              std::vector<double> theta, double tol = 1e-6,
              double eps = 1e-6) {
  std::vector<double> grad(theta.size(), 0.0);
  {
    Tape tape(&theta);
    tape.backward(build(tape), grad);
  }
  for (std::size_t i = 0; i < theta.size(); ++i) {
    auto eval = [&](double shift) {
      std::vector<double> t = theta;
      t[i] += shift;
      Tape tape(&t);
      return tape.value(build(tape))(0, 0);
    };
    const double fd = (eval(eps) - eval(-eps)) / (2 * eps);
    CHECK(grad[i] == doctest::Approx(fd).epsilon(tol).scale(1.0));
  }
}

std::vector<double> random_theta(Rng& rng, int n) {
  std::vector<double> t(n);
  for (auto& v : t) v = rng.normal();
  return t;
}

Matrix random_complex(Rng& rng, int rows, int cols) {
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      m(r, c) = Complex(rng.normal(), rng.normal());
  return m;
}

}  // namespace

TEST_SUITE_BEGIN("tape");

TEST_CASE("real op gradients against finite differences") {
  Rng rng(1);

  SUBCASE("matmul / add / trace") {
    fd_check(
        [](Tape& t) {
          const auto a = t.parameter(0, 2, 2);
          const auto b = t.parameter(4, 2, 2);
          return t.trace(t.add(t.matmul(a, b), a));
        },
        random_theta(rng, 8));
  }
  SUBCASE("hadamard / scale / sub / transpose") {
    fd_check(
        [](Tape& t) {
          const auto a = t.parameter(0, 2, 3);
          const auto b = t.parameter(6, 2, 3);
          const auto h = t.hadamard(a, b);
          const auto d = t.sub(t.scale(h, 1.7), a);
          return t.trace(t.matmul(d, t.transpose(d)));
        },
        random_theta(rng, 12));
  }
  SUBCASE("kron") {
    fd_check(
        [](Tape& t) {
          const auto a = t.parameter(0, 2, 2);
          const auto b = t.parameter(4, 2, 2);
          return t.trace(t.kron(a, b));
        },
        random_theta(rng, 8));
  }
  SUBCASE("block / vstack / hstack / reshape") {
    fd_check(
        [](Tape& t) {
          const auto a = t.parameter(0, 3, 3);
          const auto top = t.block(a, 0, 0, 1, 3);
          const auto bottom = t.block(a, 2, 0, 1, 3);
          const auto stacked = t.vstack(top, bottom);  // 2x3
          const auto wide = t.hstack(stacked, stacked);  // 2x6
          const auto re = t.reshape_rowmajor(wide, 3, 4);
          return t.trace(t.matmul(re, t.transpose(re)));
        },
        random_theta(rng, 9));
  }
  SUBCASE("relu away from kinks") {
    std::vector<double> theta{0.5, -0.7, 1.2, -2.0};
    fd_check(
        [](Tape& t) {
          const auto a = t.parameter(0, 4, 1);
          return t.trace(t.matmul(t.transpose(t.relu(a)), t.relu(a)));
        },
        theta);
  }
  SUBCASE("scalar ops") {
    std::vector<double> theta{0.8, 1.4};
    fd_check(
        [](Tape& t) {
          const auto a = t.parameter(0, 1, 1);
          const auto b = t.parameter(1, 1, 1);
          const auto e = t.exp_scalar(a);
          const auto s = t.sqrt_scalar(t.hadamard(b, b));
          return t.div_scalar(t.mul_scalar(e, s), b);
        },
        theta);
  }
}

TEST_CASE("complex composites: values and gradients") {
  Rng rng(2);

  SUBCASE("cx_matmul / cx_adjoint / cx_abs value") {
    std::vector<double> theta = random_theta(rng, 16);
    Tape tape(&theta);
    Cx a{tape.parameter(0, 2, 2), tape.parameter(4, 2, 2)};
    Cx b{tape.parameter(8, 2, 2), tape.parameter(12, 2, 2)};
    const Matrix am = ad::cx_value(tape, a);
    const Matrix bm = ad::cx_value(tape, b);
    CHECK((ad::cx_value(tape, ad::cx_matmul(tape, a, b)) - am * bm)
              .cwiseAbs()
              .maxCoeff() < 1e-14);
    CHECK((ad::cx_value(tape, ad::cx_adjoint(tape, a)) - am.adjoint())
              .cwiseAbs()
              .maxCoeff() < 1e-14);
  }

  SUBCASE("gradient through a complex pipeline") {
    fd_check(
        [](Tape& t) {
          Cx a{t.parameter(0, 2, 2), t.parameter(4, 2, 2)};
          Cx b{t.parameter(8, 2, 2), t.parameter(12, 2, 2)};
          const Cx prod = ad::cx_matmul(t, ad::cx_adjoint(t, a), b);
          const Cx k = ad::cx_kron(t, prod, a);
          const Cx tr = ad::cx_trace(t, k);
          return ad::cx_abs(t, tr);
        },
        random_theta(rng, 16));
  }

  SUBCASE("cx_ad matches the eager adjoint") {
    std::vector<double> theta = random_theta(rng, 16);
    Tape tape(&theta);
    Cx a{tape.parameter(0, 2, 2), tape.parameter(4, 2, 2)};
    Cx b{tape.parameter(8, 2, 2), tape.parameter(12, 2, 2)};
    for (int s : {-1, +1}) {
      const Matrix expect = qops::adjoint_apply(
          ad::cx_value(tape, a), s, ad::cx_value(tape, b));
      CHECK((ad::cx_value(tape, ad::cx_ad(tape, a, s, b)) - expect)
                .cwiseAbs()
                .maxCoeff() < 1e-13);
    }
  }
}

TEST_CASE("cx_expm_taylor matches the eigendecomposition exponential") {
  Rng rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    Matrix g = random_complex(rng, 6, 6);
    const Matrix h = 0.5 * (g + g.adjoint());
    for (double t : {0.05, 0.7, 3.0}) {
      std::vector<double> dummy;
      Tape tape(&dummy);
      const Cx hc = ad::cx_constant(tape, h);
      const Cx u = ad::cx_expm_taylor(
          tape, ad::cx_scale(tape, hc, Complex(0.0, -t)));
      CHECK((ad::cx_value(tape, u) - dynamics::expm(h, t)).cwiseAbs().maxCoeff() <
            1e-12);
    }
  }
}

TEST_CASE("cx_expm_taylor gradient") {
  Rng rng(4);
  fd_check(
      [](Tape& t) {
        Cx a{t.parameter(0, 2, 2), t.parameter(4, 2, 2)};
        // force anti-hermitian-ish input through scaling by -i
        const Cx scaled = ad::cx_scale(t, a, Complex(0.0, -0.4));
        const Cx u = ad::cx_expm_taylor(t, scaled);
        return ad::cx_abs(t, ad::cx_trace(t, u));
      },
      random_theta(rng, 8), 1e-5);
}

TEST_CASE("cx_thin_qr matches the eager isometry") {
  Rng rng(5);
  for (auto [rows, cols] : {std::pair{4, 2}, {8, 4}, {5, 5}}) {
    const Matrix m = random_complex(rng, rows, cols);
    std::vector<double> dummy;
    Tape tape(&dummy);
    const Cx q = ad::cx_thin_qr(tape, ad::cx_constant(tape, m));
    const Matrix expect = qops::thin_qr_isometry(m).data;
    CHECK((ad::cx_value(tape, q) - expect).cwiseAbs().maxCoeff() < 1e-12);
  }
  // Rank-deficient input goes through the canonical completion.
  std::vector<double> dummy;
  Tape tape(&dummy);
  const Cx q = ad::cx_thin_qr(
      tape, ad::cx_constant(tape, Matrix(Matrix::Zero(6, 3))));
  CHECK((ad::cx_value(tape, q) - Matrix(Matrix::Identity(6, 6).leftCols(3)))
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("cx_thin_qr gradient") {
  Rng rng(6);
  fd_check(
      [](Tape& t) {
        Cx m{t.parameter(0, 3, 2), t.parameter(6, 3, 2)};
        const Cx q = ad::cx_thin_qr(t, m);
        // contract against a fixed complex matrix to get a scalar
        const Matrix w = Matrix::Constant(3, 2, Complex(0.3, -0.8));
        const Cx wk = ad::cx_constant(t, w);
        const Cx tr = ad::cx_trace(t, ad::cx_matmul(t, ad::cx_adjoint(t, wk), q));
        return ad::cx_abs(t, tr);
      },
      random_theta(rng, 12), 1e-5);
}

TEST_CASE("zero-node shortcuts keep gradients intact") {
  Rng rng(7);
  fd_check(
      [](Tape& t) {
        const auto a = t.parameter(0, 2, 2);
        const Cx ac = ad::cx_from_real(t, a);  // imag part is a shared zero
        const Cx b = ad::cx_constant(t, Matrix(Matrix::Identity(2, 2) *
                                               Complex(0.0, 1.0)));
        const Cx prod = ad::cx_matmul(t, ac, b);
        return ad::cx_abs(t, ad::cx_trace(t, prod));
      },
      random_theta(rng, 4));
}

TEST_CASE("parameter nodes are deduplicated") {
  std::vector<double> theta{1.0, 2.0, 3.0, 4.0};
  Tape tape(&theta);
  const auto a = tape.parameter(0, 2, 2);
  const auto b = tape.parameter(0, 2, 2);
  CHECK(a == b);
  // Gradient accumulates once per use even through the shared node.
  std::vector<double> grad(4, 0.0);
  tape.backward(tape.trace(tape.add(a, b)), grad);
  CHECK(grad[0] == doctest::Approx(2.0));
  CHECK(grad[3] == doctest::Approx(2.0));
  CHECK(grad[1] == doctest::Approx(0.0));
}

TEST_SUITE_END();
