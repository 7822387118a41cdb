#include "olrg/experiment.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "olrg/parallel.hpp"
#include "olrg/rng.hpp"

namespace olrg::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool deterministic_mode() {
  const char* env = std::getenv("OLRG_DETERMINISTIC");
  return env != nullptr && std::string(env) == "1";
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

json history_json(const std::vector<train::TrainHistory>& legs) {
  const bool det = deterministic_mode();
  json arr = json::array();
  int epoch_base = 0;
  for (const auto& leg : legs) {
    for (const auto& rec : leg.epochs) {
      json item;
      item["epoch"] = epoch_base + rec.epoch;
      item["total_loss"] = rec.total_loss;
      item["per_step_losses"] = rec.per_step;
      item["wall_ms"] = det ? 0.0 : rec.wall_ms;
      arr.push_back(std::move(item));
    }
    epoch_base += static_cast<int>(leg.epochs.size());
  }
  return arr;
}

json checkpoint_json(const ExperimentConfig& cfg,
                     const std::vector<double>& params) {
  json out;
  out["schema"] = 1;
  out["mode"] = cfg.mode;
  json map;
  map["depth"] = cfg.depth;
  map["width"] = cfg.width;
  if (cfg.mode == "omm") {
    map["d_big"] = 1 << cfg.start_n;
    map["d_small"] = cfg.identity_embedding ? (1 << cfg.start_n)
                                            : (1 << (cfg.start_n - cfg.grow_l));
    map["noise_dim"] = cfg.noise_dim;
    map["ensemble_size"] = cfg.ensemble_size;
  } else {
    const int steps = (cfg.target_n - cfg.start_n) / cfg.grow_l;
    json resources;
    resources["avg_pulse_duration_per_tobc"] = hem::pulse_duration_estimate(
        std::max(cfg.order, 1), cfg.checkpoints, cfg.total_time, 1.0, 1.0);
    resources["shots_per_gradient_step_unit_e"] = hem::shot_count_estimate(
        cfg.tobc_batch, steps, 1.0, static_cast<int>(params.size()),
        cfg.order);
    out["resources"] = std::move(resources);
  }
  out["map"] = std::move(map);
  out["params"] = params;  // row-major per layer: W then b, layer order
  return out;
}

std::string results_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << "T,szsz_pred,zz_pred,zz_oracle,rel_error,best_epoch,seed\n";
  for (const auto& r : rows)
    out << format_double(r.t) << ',' << format_double(r.szsz_pred) << ','
        << format_double(r.zz_pred) << ',' << format_double(r.zz_oracle) << ','
        << format_double(r.rel_error) << ',' << r.best_epoch << ',' << r.seed
        << '\n';
  return out.str();
}

ResultRow make_row(const ExperimentConfig& cfg, double t, double zz_pred,
                   int best_epoch) {
  ResultRow row;
  row.t = t;
  row.zz_pred = zz_pred;
  row.szsz_pred = 0.25 * zz_pred;  // S^z = Z/2
  row.zz_oracle =
      verify::exact_expectation(cfg.target_n, cfg.h, cfg.obs_a, cfg.obs_b, t);
  row.rel_error = std::abs(zz_pred - row.zz_oracle) /
                  std::max(std::abs(row.zz_oracle), 1e-12);
  row.best_epoch = best_epoch;
  row.seed = cfg.seed;
  return row;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<OracleRow> run_oracle(int n, double h,
                                  const std::vector<double>& times) {
  std::vector<OracleRow> rows;
  rows.reserve(times.size());
  for (double t : times)
    rows.push_back({t, verify::exact_expectation(n, h, 1, 2, t)});
  return rows;
}

std::string oracle_csv(const std::vector<OracleRow>& rows) {
  std::ostringstream out;
  out << "T,value\n";
  for (const auto& r : rows)
    out << format_double(r.t) << ',' << format_double(r.value) << '\n';
  return out.str();
}

TrainOutcome run_train(const ExperimentConfig& cfg,
                       const std::string& output_override) {
  train::TrainConfig tc = cfg.to_train_config();
  TrainOutcome outcome;

  if (cfg.times.empty()) {
    outcome.legs.push_back(train::train(tc));
    const auto& leg = outcome.legs.back();
    if (leg.diverged) throw std::runtime_error("training diverged");
    const double pred = train::predict(tc, leg.best_params);
    outcome.rows.push_back(
        make_row(cfg, cfg.total_time, pred, leg.best_epoch));
  } else {
    outcome.legs = train::transfer_schedule(tc, cfg.times, cfg.epochs_per_point);
    for (std::size_t i = 0; i < cfg.times.size(); ++i) {
      const auto& leg = outcome.legs[i];
      if (leg.diverged) throw std::runtime_error("training diverged");
      train::TrainConfig at_time = tc;
      at_time.total_time = cfg.times[i];
      const double pred = train::predict(at_time, leg.best_params);
      outcome.rows.push_back(
          make_row(cfg, cfg.times[i], pred, leg.best_epoch));
    }
  }

  const fs::path dir =
      output_override.empty() ? fs::path(cfg.output_dir) : fs::path(output_override);
  fs::create_directories(dir);
  write_file(dir / "history.json", history_json(outcome.legs).dump(2) + "\n");
  write_file(dir / "checkpoint.json",
             checkpoint_json(cfg, outcome.legs.back().best_params).dump(2) +
                 "\n");
  write_file(dir / "results.csv", results_csv(outcome.rows));

  if (cfg.mode == "hem") {
    // Programmed controls of the largest device in the chain; only the
    // layout matters here, the weights are the trained ones.
    auto pulses =
        hem::PulseParams::create(cfg.depth, cfg.width > 0 ? cfg.width : 8, 0);
    pulses.theta = outcome.legs.back().best_params;
    const double t_max =
        cfg.times.empty() ? cfg.total_time : cfg.times.back();
    write_file(dir / "pulses.csv",
               hem::pulse_schedule_csv(pulses,
                                       cfg.target_n - cfg.grow_l, t_max,
                                       cfg.checkpoints + 1));
  }
  return outcome;
}

std::string tobc_csv(const ExperimentConfig& cfg, int order,
                     int grid_override) {
  if (cfg.start_n > 10)
    throw std::invalid_argument("tobc: dimension exceeds 2^10");
  const int m = grid_override > 0 ? grid_override : cfg.checkpoints;
  const model::ModelSpec spec{cfg.h};
  const auto set = model::initial_set(spec, cfg.start_n, cfg.obs_a, cfg.obs_b);
  const auto grid = dynamics::Checkpoints::uniform(cfg.total_time, m);
  const int n_boundary = static_cast<int>(set.boundary.size());

  double combos = 1.0;
  for (int j = 0; j < order; ++j) combos *= 2.0 * n_boundary * m;
  if (combos > 2e6)
    throw std::invalid_argument("tobc: full grid too large; reduce order or grid");

  const dynamics::SolverConfig solver;
  const tobc::Evaluator eval(set, grid, solver);

  std::ostringstream out;
  out << "order";
  for (int j = 1; j <= order; ++j) out << ",i" << j;
  for (int j = 1; j <= order; ++j) out << ",t" << j;
  for (int j = 1; j <= order; ++j) out << ",s" << j;
  out << ",re,im\n";

  tobc::TOBCIndex idx;
  idx.order = order;
  idx.boundary_ids.assign(order, 0);
  idx.times.assign(order, 0.0);
  idx.signs.assign(order, -1);
  std::vector<int> digits(3 * order, 0);
  const auto radix = [&](int pos) {
    const int what = pos % 3;
    return what == 0 ? n_boundary : (what == 1 ? m : 2);
  };
  while (true) {
    for (int j = 0; j < order; ++j) {
      idx.boundary_ids[j] = digits[3 * j];
      idx.times[j] = grid.times[digits[3 * j + 1]];
      idx.signs[j] = digits[3 * j + 2] == 0 ? -1 : 1;
    }
    const Complex chi = eval.eval(idx);
    out << order;
    for (int j = 0; j < order; ++j) out << ',' << idx.boundary_ids[j];
    for (int j = 0; j < order; ++j) out << ',' << format_double(idx.times[j]);
    for (int j = 0; j < order; ++j) out << ',' << idx.signs[j];
    out << ',' << format_double(chi.real()) << ',' << format_double(chi.imag())
        << '\n';
    int pos = 0;
    for (; pos < 3 * order; ++pos) {
      if (++digits[pos] < radix(pos)) break;
      digits[pos] = 0;
    }
    if (pos == 3 * order) break;
  }
  return out.str();
}

VerifyOutcome run_verify(const std::string& selector, int instances,
                         std::uint64_t seed) {
  json reports = json::array();
  bool ok = true;
  auto bound_json = [](const verify::BoundReport& r) {
    json j;
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["satisfied"] = r.satisfied;
    j["n"] = r.n;
    j["l"] = r.l;
    j["q"] = r.q;
    j["T"] = r.total_time;
    j["seed"] = r.seed;
    if (r.epsilon_lower_estimate) {
      j["epsilon"] = r.epsilon;
      j["constant_c"] = r.constant_c;
      j["epsilon_lower_estimate"] = true;
    }
    return j;
  };

  const bool all = selector == "all";
  bool matched = false;
  if (all || selector == "telescoping") {
    matched = true;
    const int count = instances > 0 ? instances : 200;
    std::vector<verify::BoundReport> batch(count);
    util::parallel_for(count, [&](int i) {
      batch[i] = verify::check_telescoping(2, 1, 2, 1.0, Rng::derive(seed, i));
    });
    for (const auto& r : batch) {
      ok = ok && r.satisfied;
      json j = bound_json(r);
      j["check"] = "telescoping";
      reports.push_back(std::move(j));
    }
  }
  if (all || selector == "rtbound") {
    matched = true;
    const int count = instances > 0 ? instances : 50;
    std::vector<verify::BoundReport> batch(count);
    util::parallel_for(count, [&](int i) {
      batch[i] =
          verify::check_rt_bound(2, 1, 0.5, 0.05, Rng::derive(seed, 1000 + i));
    });
    for (const auto& r : batch) {
      ok = ok && r.satisfied;
      json j = bound_json(r);
      j["check"] = "rt_bound";
      reports.push_back(std::move(j));
    }
  }
  if (all || selector == "dyson") {
    matched = true;
    for (int m : {32, 64, 128, 256}) {
      const auto rows = verify::check_dyson_truncation(0.3, 3, m);
      json j;
      j["check"] = "dyson";
      j["M"] = m;
      json errs = json::array();
      for (const auto& row : rows) errs.push_back(row.error);
      j["errors_by_order"] = errs;
      bool monotone = true;
      for (std::size_t k = 1; k < rows.size(); ++k)
        monotone = monotone && rows[k].error < rows[k - 1].error;
      j["monotone"] = monotone;
      if (m == 256) ok = ok && monotone;
      reports.push_back(std::move(j));
    }
  }
  if (all || selector == "lemmas") {
    matched = true;
    const int count = instances > 0 ? instances : 100;
    const double d1 = verify::lemma_adjoint_expansion(count, seed);
    const double d2 = verify::lemma_adjoint_kron(count, seed + 1);
    const double d3 = verify::lemma_adjoint_power(count, seed + 2);
    json j;
    j["check"] = "adjoint_lemmas";
    j["expansion_max_dev"] = d1;
    j["tensor_product_max_dev"] = d2;
    j["power_max_dev"] = d3;
    const bool pass = d1 < 1e-10 && d2 < 1e-10 && d3 < 1e-10;
    j["satisfied"] = pass;
    ok = ok && pass;
    reports.push_back(std::move(j));
  }
  if (all || selector == "exact") {
    matched = true;
    dynamics::SolverConfig ode;
    ode.method = dynamics::Method::adaptive_rk;
    for (int n : {2, 4, 6}) {
      for (double t : {1.0, 5.0}) {
        const double a = verify::exact_expectation(n, 1.0, 1, 2, t);
        const double b = verify::exact_expectation(n, 1.0, 1, 2, t, ode);
        json j;
        j["check"] = "exact_self_consistency";
        j["n"] = n;
        j["T"] = t;
        j["expm"] = a;
        j["ode"] = b;
        const bool pass = std::abs(a - b) < 1e-7;
        j["satisfied"] = pass;
        ok = ok && pass;
        reports.push_back(std::move(j));
      }
    }
  }
  if (!matched)
    throw std::invalid_argument("verify: unknown suite '" + selector + "'");

  VerifyOutcome out;
  out.json = reports.dump(2) + "\n";
  out.all_ok = ok;
  return out;
}

std::string report_csv(const std::vector<std::string>& dirs) {
  std::ostringstream out;
  out << "run,T,szsz_pred,zz_pred,zz_oracle,rel_error,best_epoch,seed,epochs,"
         "final_loss\n";
  for (const auto& dir : dirs) {
    const fs::path results = fs::path(dir) / "results.csv";
    const fs::path history = fs::path(dir) / "history.json";
    std::ifstream rin(results);
    if (!rin) throw std::runtime_error("report: missing " + results.string());
    int epochs = 0;
    double final_loss = 0.0;
    {
      std::ifstream hin(history);
      if (hin) {
        json h = json::parse(hin);
        epochs = static_cast<int>(h.size());
        if (!h.empty()) final_loss = h.back()["total_loss"].get<double>();
      }
    }
    std::string line;
    std::getline(rin, line);  // header
    while (std::getline(rin, line)) {
      if (line.empty()) continue;
      out << fs::path(dir).filename().string() << ',' << line << ','
          << epochs << ',' << format_double(final_loss) << '\n';
    }
  }
  return out.str();
}

}  // namespace olrg::cli
