#include <doctest.h>

#include <cmath>

#include "olrg/train.hpp"
#include "olrg/verify.hpp"

using namespace olrg;

namespace {

train::TrainConfig small_omm_config() {
  train::TrainConfig cfg;
  cfg.mode = train::MapMode::omm;
  cfg.start_n = 2;
  cfg.target_n = 3;
  cfg.grow_l = 1;
  cfg.total_time = 1.0;
  cfg.checkpoints = 8;
  cfg.order = 1;
  cfg.tobc_batch = 6;
  cfg.depth = 1;
  cfg.width = 10;
  cfg.noise_dim = 2;
  cfg.ensemble_size = 2;
  cfg.epochs = 5;
  cfg.learning_rate = 1e-3;
  cfg.seed = 3;
  cfg.substeps = 4;
  return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("train");

TEST_CASE("grad on a quadratic fixture") {
  train::LossFunction quad;
  quad.value = [](const std::vector<double>& th) {
    double acc = 0.0;
    for (double v : th) acc += v * v;
    return acc;
  };
  const std::vector<double> theta{0.3, -1.2, 2.0};
  const auto g =
      train::grad(quad, theta, train::GradMethod::finite_diff, 1e-6);
  for (std::size_t i = 0; i < theta.size(); ++i)
    CHECK(g[i] == doctest::Approx(2.0 * theta[i]).epsilon(1e-8));

  train::LossFunction constant;
  constant.value = [](const std::vector<double>&) { return 4.2; };
  for (double gi :
       train::grad(constant, theta, train::GradMethod::finite_diff))
    CHECK(gi == 0.0);
}

TEST_CASE("adjoint gradient matches finite differences on the OMM chain") {
  const auto cfg = small_omm_config();
  const auto setup = train::make_setup(cfg);
  auto proto = omm::OMMParams::create(4, 2, 1, 10, 2, 2, 3);
  engine::OmmProblem problem(setup, proto);

  const std::uint64_t epoch_seed = 99;
  train::LossFunction loss;
  loss.value = [&](const std::vector<double>& th) {
    ad::Tape tape(&th);
    return problem.build_loss(tape, epoch_seed).total_value;
  };
  loss.value_and_grad = [&](const std::vector<double>& th,
                            std::vector<double>& g) {
    ad::Tape tape(&th);
    const auto el = problem.build_loss(tape, epoch_seed);
    tape.backward(el.total, g);
    return el.total_value;
  };

  const auto adj = train::grad(loss, proto.theta, train::GradMethod::adjoint);
  const auto fd =
      train::grad(loss, proto.theta, train::GradMethod::finite_diff, 1e-5);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < adj.size(); ++i) {
    num += (adj[i] - fd[i]) * (adj[i] - fd[i]);
    den += fd[i] * fd[i];
  }
  CHECK(std::sqrt(num / den) < 1e-3);
}

TEST_CASE("adam optimizer") {
  SUBCASE("zero gradient leaves parameters unchanged") {
    std::vector<double> theta{1.0, -2.0};
    train::AdamState state;
    train::adam_step(theta, {0.0, 0.0}, state, 0.1);
    CHECK(theta[0] == 1.0);
    CHECK(theta[1] == -2.0);
  }

  SUBCASE("first step moves by -lr * sign(g)") {
    std::vector<double> theta{0.0, 0.0};
    train::AdamState state;
    train::adam_step(theta, {0.3, -5.0}, state, 0.01);
    CHECK(theta[0] == doctest::Approx(-0.01).epsilon(1e-6));
    CHECK(theta[1] == doctest::Approx(0.01).epsilon(1e-6));
  }

  SUBCASE("200 steps on the quadratic against the reference recursion") {
    std::vector<double> theta{1.0};
    train::AdamState state;
    // Reference recursion maintained independently.
    double x = 1.0, m = 0.0, v = 0.0;
    const double lr = 0.05, b1 = 0.9, b2 = 0.999, eps = 1e-8;
    for (int t = 1; t <= 200; ++t) {
      const double g = 2.0 * theta[0];
      train::adam_step(theta, {g}, state, lr);

      const double gr = 2.0 * x;
      m = b1 * m + (1 - b1) * gr;
      v = b2 * v + (1 - b2) * gr * gr;
      const double mh = m / (1 - std::pow(b1, t));
      const double vh = v / (1 - std::pow(b2, t));
      x -= lr * mh / (std::sqrt(vh) + eps);
      CHECK(theta[0] == doctest::Approx(x).epsilon(1e-12));
    }
    CHECK(std::abs(theta[0]) < 1e-2);
  }
}

TEST_CASE("select_best_epoch") {
  CHECK(train::select_best_epoch({5, 4, 3, 2, 1}, 2) == 4);
  CHECK(train::select_best_epoch({2, 2, 2, 2}, 3) == 2);  // earliest window end
  CHECK(train::select_best_epoch({5, 4, 3, 10, 10, 10}, 2) == 2);
  CHECK_THROWS_AS(train::select_best_epoch({1.0}, 10), std::invalid_argument);
}

TEST_CASE("training is reproducible and length-contracted") {
  auto cfg = small_omm_config();
  cfg.epochs = 1;
  const auto one = train::train(cfg);
  CHECK(one.epochs.size() == 1);

  cfg.epochs = 6;
  const auto a = train::train(cfg);
  const auto b = train::train(cfg);
  REQUIRE(a.epochs.size() == b.epochs.size());
  for (std::size_t e = 0; e < a.epochs.size(); ++e)
    CHECK(a.epochs[e].total_loss == b.epochs[e].total_loss);
  REQUIRE(a.best_params.size() == b.best_params.size());
  for (std::size_t i = 0; i < a.best_params.size(); ++i)
    CHECK(a.best_params[i] == b.best_params[i]);
  for (const auto& rec : a.epochs) CHECK(rec.total_loss >= 0.0);
}

TEST_CASE("identity fixture keeps the loss at the numerical floor") {
  train::TrainConfig cfg = small_omm_config();
  cfg.start_n = 2;
  cfg.target_n = 4;
  cfg.identity_embedding = true;
  cfg.noise_dim = 0;
  cfg.ensemble_size = 1;
  cfg.epochs = 3;
  const auto hist = train::train(cfg);
  for (const auto& rec : hist.epochs) CHECK(rec.total_loss < 1e-10);
}

TEST_CASE("HEM with exact constant pulses starts at zero loss") {
  auto pulses = hem::PulseParams::create(1, 4, 0);
  std::fill(pulses.theta.begin(), pulses.theta.end(), 0.0);
  pulses.theta[pulses.omega_layout.layers.back().b_offset] = 1.0;
  pulses.theta[pulses.delta_layout.layers.back().b_offset] = 2.0;
  pulses.theta[pulses.v_layout.layers.back().b_offset] = 4.0;

  train::TrainConfig cfg;
  cfg.mode = train::MapMode::hem;
  cfg.start_n = 2;
  cfg.target_n = 3;
  cfg.grow_l = 1;
  cfg.total_time = 1.0;
  cfg.checkpoints = 8;
  cfg.order = 2;
  cfg.tobc_batch = 6;
  cfg.depth = 1;
  cfg.width = 4;
  cfg.epochs = 1;
  cfg.seed = 0;
  cfg.substeps = 8;
  const auto hist = train::train(cfg, &pulses.theta);
  REQUIRE(hist.epochs.size() == 1);
  CHECK(hist.epochs[0].per_step[0] < 1e-6);
}

TEST_CASE("transfer schedule") {
  auto cfg = small_omm_config();
  cfg.epochs = 4;

  SUBCASE("single point equals a plain run") {
    const auto legs = train::transfer_schedule(cfg, {1.0}, 4);
    REQUIRE(legs.size() == 1);
    const auto direct = train::train(cfg);
    REQUIRE(legs[0].epochs.size() == direct.epochs.size());
    for (std::size_t e = 0; e < direct.epochs.size(); ++e)
      CHECK(legs[0].epochs[e].total_loss == direct.epochs[e].total_loss);
  }

  SUBCASE("zero-epoch second leg carries the warm start") {
    const auto legs = train::transfer_schedule(cfg, {0.5, 1.0}, 0);
    REQUIRE(legs.size() == 2);
    CHECK(legs[1].epochs.empty());
    REQUIRE(legs[1].best_params.size() == legs[0].best_params.size());
    for (std::size_t i = 0; i < legs[0].best_params.size(); ++i)
      CHECK(legs[1].best_params[i] == legs[0].best_params[i]);
  }

  SUBCASE("times must ascend") {
    CHECK_THROWS_AS(train::transfer_schedule(cfg, {1.0, 0.5}, 2),
                    std::invalid_argument);
  }
}

TEST_CASE("config validation names the offending field") {
  auto cfg = small_omm_config();
  cfg.target_n = 6;
  cfg.grow_l = 3;
  CHECK_THROWS_WITH_AS(cfg.validate(),
                       "model: target_N - start_n must be divisible by grow_l",
                       std::invalid_argument);
  cfg = small_omm_config();
  cfg.epochs = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_SUITE_END();
