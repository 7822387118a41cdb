#include "olrg/train.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "olrg/rng.hpp"

namespace olrg::train {

namespace {

constexpr std::uint64_t kInitStream = 0xA11CE;
constexpr std::uint64_t kPredictStream = 0xBEEF;

engine::OmmProblem make_omm_problem(const TrainConfig& cfg) {
  const int d_big = 1 << cfg.start_n;
  const int d_small = cfg.identity_embedding ? d_big : (d_big >> cfg.grow_l);
  auto proto = omm::OMMParams::create(
      d_big, d_small, cfg.depth, cfg.width, cfg.noise_dim, cfg.ensemble_size,
      Rng::derive(cfg.seed, kInitStream));
  return {make_setup(cfg), std::move(proto)};
}

engine::HemProblem make_hem_problem(const TrainConfig& cfg) {
  const int width = cfg.width > 0 ? cfg.width : 8;
  auto proto = hem::PulseParams::create(cfg.depth, width,
                                        Rng::derive(cfg.seed, kInitStream));
  return {make_setup(cfg), std::move(proto)};
}

double wall_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

void TrainConfig::validate() const {
  auto fail = [](const char* what) { throw std::invalid_argument(what); };
  if (epochs < 1) fail("train.epochs must be >= 1");
  if (moving_avg_window < 1) fail("train.window must be >= 1");
  if (grow_l < 1) fail("model.grow_l must be >= 1");
  if (start_n < 1) fail("model.start_n must be >= 1");
  if (target_n < start_n) fail("model.target_N must be >= start_n");
  if ((target_n - start_n) % grow_l != 0)
    fail("model: target_N - start_n must be divisible by grow_l");
  if (tobc_batch < 1) fail("loss.tobc_batch must be >= 1");
  if (checkpoints < 1) fail("loss.checkpoints must be >= 1");
  if (order < 0) fail("loss.order must be >= 0");
  if (total_time <= 0 && transfer_times.empty())
    fail("loss.T must be > 0");
  if (learning_rate <= 0) fail("train.lr must be > 0");
  if (ensemble_size < 1) fail("map.ensemble_size must be >= 1");
  if (depth < 0) fail("map.depth must be >= 0");
}

engine::Setup make_setup(const TrainConfig& cfg) {
  engine::Setup setup;
  setup.spec.h = cfg.h;
  setup.start_n = cfg.start_n;
  setup.target_n = cfg.target_n;
  setup.grow_l = cfg.grow_l;
  setup.total_time = cfg.total_time;
  setup.checkpoints = cfg.checkpoints;
  setup.order = cfg.order;
  setup.batch = cfg.tobc_batch;
  setup.substeps = cfg.substeps;
  setup.map_override = cfg.identity_embedding
                           ? engine::MapOverride::identity_embedding
                           : engine::MapOverride::none;
  return setup;
}

std::vector<double> grad(const LossFunction& loss,
                         const std::vector<double>& params, GradMethod method,
                         double fd_eps) {
  if (method == GradMethod::adjoint) {
    if (!loss.value_and_grad)
      throw std::invalid_argument("grad: no adjoint path available");
    std::vector<double> g(params.size(), 0.0);
    const double v = loss.value_and_grad(params, g);
    if (!std::isfinite(v))
      throw std::runtime_error("grad: non-finite loss value");
    return g;
  }
  std::vector<double> g(params.size(), 0.0);
  std::vector<double> work = params;
  for (std::size_t i = 0; i < params.size(); ++i) {
    work[i] = params[i] + fd_eps;
    const double up = loss.value(work);
    work[i] = params[i] - fd_eps;
    const double down = loss.value(work);
    work[i] = params[i];
    if (!std::isfinite(up) || !std::isfinite(down))
      throw std::runtime_error("grad: non-finite loss at parameter " +
                               std::to_string(i));
    g[i] = (up - down) / (2.0 * fd_eps);
  }
  return g;
}

void adam_step(std::vector<double>& params, const std::vector<double>& g,
               AdamState& state, double lr, double beta1, double beta2,
               double eps) {
  if (params.size() != g.size())
    throw std::invalid_argument("adam_step: shape mismatch");
  if (state.m.empty()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
  }
  ++state.t;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * g[i];
    state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * g[i] * g[i];
    const double m_hat = state.m[i] / bc1;
    const double v_hat = state.v[i] / bc2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
  }
}

int select_best_epoch(const std::vector<double>& totals, int window) {
  if (static_cast<int>(totals.size()) < window)
    throw std::invalid_argument("select_best_epoch: history shorter than window");
  int best = -1;
  double best_avg = 0.0;
  double acc = 0.0;
  for (int e = 0; e < static_cast<int>(totals.size()); ++e) {
    acc += totals[e];
    if (e >= window) acc -= totals[e - window];
    if (e < window - 1) continue;
    const double avg = acc / window;
    if (best < 0 || avg < best_avg) {
      best = e;
      best_avg = avg;
    }
  }
  return best;
}

TrainHistory train(const TrainConfig& cfg,
                   const std::vector<double>* warm_start) {
  cfg.validate();
  TrainHistory history;

  auto run = [&](auto problem) {
    std::vector<double> theta =
        warm_start ? *warm_start : problem.prototype().theta;
    if (static_cast<int>(theta.size()) != problem.param_count())
      throw std::invalid_argument("train: warm start has wrong size");

    AdamState adam;
    double best_ma = 0.0;
    double ma_acc = 0.0;
    std::vector<double> totals;
    const auto t0 = std::chrono::steady_clock::now();

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      const std::uint64_t epoch_seed =
          Rng::derive(cfg.seed, static_cast<std::uint64_t>(epoch));

      std::vector<double> g(theta.size(), 0.0);
      double value = 0.0;
      engine::EpochLoss el;
      {
        ad::Tape tape(&theta);
        el = problem.build_loss(tape, epoch_seed);
        value = el.total_value;
        if (!std::isfinite(value)) {
          history.diverged = true;
          break;
        }
        if (cfg.grad_method == GradMethod::adjoint) {
          tape.backward(el.total, g);
        }
      }
      if (cfg.grad_method == GradMethod::finite_diff) {
        LossFunction fd_loss;
        fd_loss.value = [&](const std::vector<double>& th) {
          ad::Tape tape(&th);
          return problem.build_loss(tape, epoch_seed).total_value;
        };
        g = grad(fd_loss, theta, GradMethod::finite_diff, cfg.fd_eps);
      }

      EpochRecord rec;
      rec.epoch = epoch;
      rec.total_loss = value;
      rec.per_step = el.per_step;
      rec.wall_ms = wall_since(t0);
      history.epochs.push_back(std::move(rec));
      totals.push_back(value);

      // Trailing moving average; keep the parameters of the best window end.
      ma_acc += value;
      if (epoch >= cfg.moving_avg_window) ma_acc -= totals[epoch - cfg.moving_avg_window];
      if (epoch >= cfg.moving_avg_window - 1) {
        const double ma = ma_acc / cfg.moving_avg_window;
        if (history.best_epoch < 0 || ma < best_ma) {
          best_ma = ma;
          history.best_epoch = epoch;
          history.best_params = theta;
        }
      }
      if (cfg.snapshot_interval > 0 && epoch % cfg.snapshot_interval == 0)
        history.snapshots.emplace_back(epoch, theta);

      adam_step(theta, g, adam, cfg.learning_rate);
    }

    history.final_params = theta;
    if (history.best_epoch < 0) {
      // Shorter run than the window: fall back to the last evaluated epoch.
      history.best_epoch = static_cast<int>(history.epochs.size()) - 1;
      history.best_params = theta;
    }
  };

  if (cfg.mode == MapMode::omm)
    run(make_omm_problem(cfg));
  else
    run(make_hem_problem(cfg));
  return history;
}

double predict(const TrainConfig& cfg, const std::vector<double>& theta) {
  dynamics::SolverConfig solver;
  if (cfg.mode == MapMode::omm)
    return make_omm_problem(cfg).predict(
        theta, Rng::derive(cfg.seed, kPredictStream), solver);
  return make_hem_problem(cfg).predict(theta, solver);
}

std::vector<TrainHistory> transfer_schedule(const TrainConfig& cfg,
                                            const std::vector<double>& times,
                                            int epochs_per_point) {
  if (times.empty())
    throw std::invalid_argument("transfer_schedule: empty time list");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (times[i] <= times[i - 1])
      throw std::invalid_argument("transfer_schedule: times must ascend");

  std::vector<TrainHistory> legs;
  std::vector<double> warm;
  for (std::size_t i = 0; i < times.size(); ++i) {
    TrainConfig leg_cfg = cfg;
    leg_cfg.total_time = times[i];
    leg_cfg.transfer_times.clear();
    if (epochs_per_point > 0) leg_cfg.epochs = epochs_per_point;

    if (i > 0 && epochs_per_point == 0) {
      // Pass-through leg: carry the warm start unchanged.
      TrainHistory leg;
      leg.best_epoch = -1;
      leg.best_params = warm;
      leg.final_params = warm;
      legs.push_back(std::move(leg));
      continue;
    }
    TrainHistory leg =
        train(leg_cfg, i == 0 ? nullptr : &warm);
    warm = leg.best_params;
    legs.push_back(std::move(leg));
  }
  return legs;
}

}  // namespace olrg::train
