#include <doctest.h>

#include "olrg/engine.hpp"
#include "olrg/omm.hpp"
#include "olrg/rng.hpp"
#include "olrg/tobc.hpp"
#include "olrg/train.hpp"
#include "olrg/verify.hpp"

using namespace olrg;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

RealVector gaussian_noise(Rng& rng, int n) {
  RealVector v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.normal();
  return v;
}

}  // namespace

TEST_SUITE_BEGIN("omm");

TEST_CASE("zero network output falls back to canonical columns") {
  auto params = omm::OMMParams::create(4, 2, 1, 8, 2, 1, 42);
  std::fill(params.theta.begin(), params.theta.end(), 0.0);
  Rng rng(1);
  const auto v = omm::omm_forward(params, model::tfim_hamiltonian(2, 1.0),
                                  gaussian_noise(rng, 2));
  CHECK(max_abs(v.data - Matrix(Matrix::Identity(4, 4).leftCols(2))) == 0.0);
}

TEST_CASE("forward produces an isometry, deterministically") {
  auto params = omm::OMMParams::create(4, 2, 2, 16, 3, 1, 9);
  Rng rng(2);
  const auto x = model::tfim_hamiltonian(2, 1.0);
  const RealVector noise = gaussian_noise(rng, 3);
  const auto v1 = omm::omm_forward(params, x, noise);
  CHECK(max_abs(v1.data.adjoint() * v1.data - qops::identity(2)) < 1e-10);

  const auto v2 = omm::omm_forward(params, x, noise);
  CHECK(std::memcmp(v1.data.data(), v2.data.data(),
                    sizeof(Complex) * v1.data.size()) == 0);

  CHECK_THROWS_AS(
      omm::omm_forward(params, model::tfim_hamiltonian(3, 1.0), noise),
      std::invalid_argument);
}

TEST_CASE("square unitary map preserves every correlator") {
  auto params = omm::OMMParams::create(4, 4, 1, 16, 2, 1, 5);
  Rng rng(3);
  const model::ModelSpec spec{1.0};
  const auto set = model::initial_set(spec, 2);
  const auto virt = omm::omm_apply(params, set, gaussian_noise(rng, 2));
  CHECK(virt.is_virtual);
  CHECK(virt.n_sites == 2);

  const auto grid = dynamics::Checkpoints::uniform(1.0, 8);
  const auto indices = tobc::sample_mixed_orders(11, 2, 12, grid, 1);
  CHECK(tobc::loss_step(set, virt, indices, 1.0, {}) < 1e-8);
}

TEST_CASE("isometry maps the identity to the reduced identity") {
  auto params = omm::OMMParams::create(8, 4, 2, 32, 4, 1, 6);
  Rng rng(4);
  const auto v = omm::omm_forward(params, model::tfim_hamiltonian(3, 1.0),
                                  gaussian_noise(rng, 4));
  CHECK(max_abs(v.data.adjoint() * qops::identity(8) * v.data -
                qops::identity(4)) < 1e-10);
}

TEST_CASE("compression keeps hermiticity and the spectrum bounds") {
  auto params = omm::OMMParams::create(16, 8, 2, 64, 4, 1, 7);
  Rng rng(5);
  const model::ModelSpec spec{1.0};
  const auto s4 = model::initial_set(spec, 4);
  const auto virt = omm::omm_apply(params, s4, gaussian_noise(rng, 4));

  CHECK(qops::is_hermitian(virt.hamiltonian.data, 1e-10));
  CHECK(qops::is_hermitian(virt.rho.data, 1e-10));

  // Eigenvalues of V^dag H V interlace within the spectrum of H.
  Eigen::SelfAdjointEigenSolver<Matrix> big(s4.hamiltonian.data);
  Eigen::SelfAdjointEigenSolver<Matrix> small(virt.hamiltonian.data);
  CHECK(small.eigenvalues().minCoeff() >=
        big.eigenvalues().minCoeff() - 1e-10);
  CHECK(small.eigenvalues().maxCoeff() <=
        big.eigenvalues().maxCoeff() + 1e-10);
}

TEST_CASE("ensemble semantics") {
  auto params = omm::OMMParams::create(4, 2, 1, 8, 0, 3, 8);
  const model::ModelSpec spec{1.0};
  const auto set = model::initial_set(spec, 2);

  // noise_dim = 0: all copies identical.
  Rng rng(6);
  const auto copies = omm::ensemble_apply(params, set, rng);
  REQUIRE(copies.size() == 3);
  for (const auto& c : copies)
    CHECK(max_abs(c.hamiltonian.data - copies[0].hamiltonian.data) == 0.0);

  // ensemble_size = 1 reduces to a single application.
  params = omm::OMMParams::create(4, 2, 1, 8, 2, 1, 8);
  Rng rng_a(7), rng_b(7);
  const auto single = omm::ensemble_apply(params, set, rng_a);
  const auto direct = omm::omm_apply(params, set, gaussian_noise(rng_b, 2));
  REQUIRE(single.size() == 1);
  CHECK(max_abs(single[0].hamiltonian.data - direct.hamiltonian.data) == 0.0);
}

TEST_CASE("repeated compress-then-grow keeps the working dimension fixed") {
  auto params = omm::OMMParams::create(16, 8, 1, 16, 2, 1, 31);
  const model::ModelSpec spec{1.0};
  Rng rng(12);
  model::RelevantSet set = model::initial_set(spec, 4);
  for (int step = 0; step < 5; ++step) {
    RealVector noise(2);
    noise << rng.normal(), rng.normal();
    set = model::grow_set(spec, omm::omm_apply(params, set, noise), 1);
    CHECK(set.dim() == 16);
    CHECK(set.n_sites == 4 + step + 1);
  }
}

TEST_CASE("constant-memory chain: dimension returns to 2^n0") {
  train::TrainConfig cfg;
  cfg.mode = train::MapMode::omm;
  cfg.start_n = 3;
  cfg.target_n = 6;
  cfg.grow_l = 1;
  cfg.total_time = 0.5;
  cfg.checkpoints = 6;
  cfg.order = 1;
  cfg.tobc_batch = 4;
  cfg.depth = 1;
  cfg.width = 8;
  cfg.noise_dim = 2;
  cfg.ensemble_size = 2;
  cfg.epochs = 1;
  const auto setup = train::make_setup(cfg);
  auto proto = omm::OMMParams::create(8, 4, 1, 8, 2, 2, 1);
  engine::OmmProblem problem(setup, proto);
  std::vector<double> theta = proto.theta;
  ad::Tape tape(&theta);
  const auto loss = problem.build_loss(tape, 3);
  CHECK(loss.per_step.size() == 3);  // one loss per growing step
  CHECK(std::isfinite(loss.total_value));
}

TEST_CASE("identity embedding reproduces exact dynamics up to n0 = 4") {
  for (int n0 : {2, 3, 4}) {
    train::TrainConfig cfg;
    cfg.mode = train::MapMode::omm;
    cfg.start_n = n0;
    cfg.target_n = n0 + 2;
    cfg.grow_l = 1;
    cfg.total_time = 1.0;
    cfg.checkpoints = 8;
    cfg.order = 1;
    cfg.tobc_batch = 4;
    cfg.identity_embedding = true;
    cfg.ensemble_size = 1;
    cfg.noise_dim = 0;
    cfg.depth = 1;
    cfg.width = 4;
    const auto setup = train::make_setup(cfg);
    auto proto = omm::OMMParams::create(1 << n0, 1 << n0, 1, 4, 0, 1, 2);
    engine::OmmProblem problem(setup, proto);
    const double pred = problem.predict(proto.theta, 5, {});
    const double oracle =
        verify::exact_expectation(n0 + 2, 1.0, 1, 2, 1.0);
    CHECK(std::abs(pred - oracle) < 1e-8);
  }
}

TEST_SUITE_END();
