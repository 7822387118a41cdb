#include <doctest.h>

#include "olrg/model.hpp"
#include "olrg/omm.hpp"
#include "olrg/rng.hpp"

using namespace olrg;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

Matrix random_isometry(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix g(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      g(r, c) = Complex(rng.normal(), rng.normal());
  return qops::thin_qr_isometry(g).data;
}

}  // namespace

TEST_SUITE_BEGIN("model");

TEST_CASE("tfim hamiltonian construction") {
  const Matrix x = qops::pauli('X').data;
  const Matrix z = qops::pauli('Z').data;
  const Matrix eye = qops::identity(2);

  CHECK(max_abs(model::tfim_hamiltonian(1, 1.0).data - x) == 0.0);

  const Matrix h2 = model::tfim_hamiltonian(2, 1.0).data;
  const Matrix ref =
      qops::kron(z, z) + qops::kron(x, eye) + qops::kron(eye, x);
  CHECK(max_abs(h2 - ref) < 1e-15);

  CHECK_THROWS_AS(model::tfim_hamiltonian(0, 1.0), std::invalid_argument);
}

TEST_CASE("tfim n=3 h=0 diagonal matches bitstring enumeration") {
  // Oracle: sum the bond eigenvalues z_i z_{i+1} over all bitstrings, with
  // site 1 on the most significant bit (first tensor factor).
  const Matrix h3 = model::tfim_hamiltonian(3, 0.0).data;
  std::vector<double> expected;
  for (int b = 0; b < 8; ++b) {
    const int z1 = 1 - 2 * ((b >> 2) & 1);
    const int z2 = 1 - 2 * ((b >> 1) & 1);
    const int z3 = 1 - 2 * (b & 1);
    expected.push_back(z1 * z2 + z2 * z3);
  }
  for (int i = 0; i < 8; ++i) {
    CHECK(h3(i, i).real() == doctest::Approx(expected[i]).epsilon(1e-15));
    for (int j = 0; j < 8; ++j)
      if (i != j) CHECK(std::abs(h3(i, j)) == 0.0);
  }
  // Basis-independent statement: the multiset of diagonal entries.
  std::vector<double> sorted_expected{-2, -2, 0, 0, 0, 0, 2, 2};
  std::vector<double> diag;
  for (int i = 0; i < 8; ++i) diag.push_back(h3(i, i).real());
  std::sort(diag.begin(), diag.end());
  CHECK(diag == sorted_expected);
}

TEST_CASE("boundary_set") {
  const model::ModelSpec spec{1.0};
  const Matrix z = qops::pauli('Z').data;
  for (int n : {2, 3, 5}) {
    const auto set = model::initial_set(spec, n);
    const auto boundary = model::boundary_set(spec, set);
    REQUIRE(boundary.size() == 1);
    const Matrix ref = qops::kron(qops::identity(set.dim() / 2), z);
    CHECK(max_abs(boundary[0].data - ref) == 0.0);
  }
}

TEST_CASE("grow_set from one site") {
  const model::ModelSpec spec{1.0};
  const Matrix x = qops::pauli('X').data;
  const Matrix z = qops::pauli('Z').data;
  const Matrix eye = qops::identity(2);

  const auto s1 = model::initial_set(spec, 1);
  CHECK(max_abs(s1.hamiltonian.data - x) == 0.0);
  CHECK(max_abs(s1.observable.data - z) == 0.0);

  const auto s2 = model::grow_set(spec, s1, 1);
  CHECK(s2.n_sites == 2);
  const Matrix h2 =
      qops::kron(x, eye) + qops::kron(z, z) + qops::kron(eye, x);
  CHECK(max_abs(s2.hamiltonian.data - h2) < 1e-15);
  Matrix rho2 = Matrix::Zero(4, 4);
  rho2(0, 0) = 1.0;
  CHECK(max_abs(s2.rho.data - rho2) == 0.0);
  CHECK(max_abs(s2.observable.data - qops::kron(z, eye)) == 0.0);
}

TEST_CASE("grow composition: one l=2 step equals two l=1 steps") {
  const model::ModelSpec spec{0.7};
  const auto s2 = model::initial_set(spec, 2);
  const auto once = model::grow_set(spec, s2, 2);
  const auto twice = model::grow_set(spec, model::grow_set(spec, s2, 1), 1);
  CHECK(max_abs(once.hamiltonian.data - twice.hamiltonian.data) < 1e-12);
  CHECK(max_abs(once.rho.data - twice.rho.data) < 1e-12);
  CHECK(max_abs(once.observable.data - twice.observable.data) < 1e-12);
  CHECK(max_abs(once.boundary[0].data - twice.boundary[0].data) < 1e-12);
}

TEST_CASE("grown chain reproduces the direct construction") {
  const model::ModelSpec spec{1.0};
  for (int n = 1; n <= 3; ++n) {
    auto set = model::initial_set(spec, n);
    for (int target = n + 1; target <= std::min(8, n + 5); ++target) {
      set = model::grow_set(spec, set, 1);
      CHECK(max_abs(set.hamiltonian.data -
                    model::tfim_hamiltonian(target, 1.0).data) < 1e-12);
    }
  }
}

TEST_CASE("virtual grow keeps the compressed structure") {
  const model::ModelSpec spec{1.0};
  Rng rng(17);
  const auto s2 = model::initial_set(spec, 2);
  const Matrix v = random_isometry(rng, 4, 2);
  const auto virt = omm::conjugate_set(s2, v);
  CHECK(virt.is_virtual);

  const auto grown = model::grow_set(spec, virt, 1);
  const Matrix z = qops::pauli('Z').data;
  const Matrix x = qops::pauli('X').data;
  const Matrix expected =
      qops::kron(virt.hamiltonian.data, qops::identity(2)) +
      qops::kron(virt.boundary[0].data, z) +
      qops::kron(qops::identity(2), Matrix(1.0 * x));
  CHECK(max_abs(grown.hamiltonian.data - expected) < 1e-13);
  CHECK(grown.is_virtual);
  CHECK(grown.n_sites == 3);
  CHECK(grown.dim() == 4);
}

TEST_CASE("boundary saturation under growth") {
  const model::ModelSpec spec{1.0};
  auto set = model::initial_set(spec, 2);
  const std::size_t before = set.boundary.size();
  for (int l : {1, 2, 3}) {
    const auto grown = model::grow_set(spec, set, l);
    CHECK(grown.boundary.size() == before);
  }
}

TEST_CASE("growth preserves hermiticity") {
  const model::ModelSpec spec{1.3};
  auto set = model::initial_set(spec, 2);
  for (int step = 0; step < 3; ++step) {
    set = model::grow_set(spec, set, 1);
    CHECK(qops::is_hermitian(set.hamiltonian.data, 1e-12));
    CHECK(qops::is_hermitian(set.rho.data, 1e-12));
    CHECK(qops::is_hermitian(set.observable.data, 1e-12));
    CHECK(qops::is_hermitian(set.boundary[0].data, 1e-12));
  }
}

TEST_CASE("two_point_observable") {
  const Matrix z = qops::pauli('Z').data;
  const Matrix eye = qops::identity(2);
  CHECK(max_abs(model::two_point_observable(2, 1, 2).data - qops::kron(z, z)) ==
        0.0);
  const Matrix ref3 = qops::kron(qops::kron(z, z), eye);
  CHECK(max_abs(model::two_point_observable(3, 1, 2).data - ref3) == 0.0);

  // <00000| Z1 Z2 |00000> = 1
  const auto obs5 = model::two_point_observable(5, 1, 2).data;
  CHECK(obs5(0, 0).real() == doctest::Approx(1.0));

  CHECK_THROWS_AS(model::two_point_observable(3, 2, 2), std::invalid_argument);
  CHECK_THROWS_AS(model::two_point_observable(3, 1, 4), std::invalid_argument);
}

TEST_CASE("validate checks the real-set invariants") {
  const model::ModelSpec spec{1.0};
  auto set = model::initial_set(spec, 2);
  CHECK_NOTHROW(model::validate(set));

  auto broken = set;
  broken.rho.data *= 2.0;  // trace 2
  CHECK_THROWS_AS(model::validate(broken), std::runtime_error);

  auto virt = set;
  virt.is_virtual = true;
  virt.rho.data *= 2.0;  // virtual sets are exempt from trace/PSD
  CHECK_NOTHROW(model::validate(virt));
}

TEST_SUITE_END();
