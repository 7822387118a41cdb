#pragma once

#include <string>
#include <vector>

#include "olrg/config.hpp"
#include "olrg/verify.hpp"

namespace olrg::cli {

/// Deterministic shortest-lossless float formatting for CSV/JSON output.
std::string format_double(double v);

struct OracleRow {
  double t = 0.0;
  double value = 0.0;
};

std::vector<OracleRow> run_oracle(int n, double h,
                                  const std::vector<double>& times);
std::string oracle_csv(const std::vector<OracleRow>& rows);

struct ResultRow {
  double t = 0.0;
  double szsz_pred = 0.0;
  double zz_pred = 0.0;
  double zz_oracle = 0.0;
  double rel_error = 0.0;
  int best_epoch = 0;
  std::uint64_t seed = 0;
};

struct TrainOutcome {
  std::vector<ResultRow> rows;
  std::vector<train::TrainHistory> legs;
};

/// Runs the configured training (single time point or transfer schedule) and
/// writes history.json, checkpoint.json and results.csv into the output
/// directory. With OLRG_DETERMINISTIC=1, wall-clock fields are zeroed so the
/// files are byte-reproducible.
TrainOutcome run_train(const ExperimentConfig& cfg,
                       const std::string& output_override = "");

/// Full-grid correlator dump for the configured system at `order`.
std::string tobc_csv(const ExperimentConfig& cfg, int order,
                     int grid_override = 0);

struct VerifyOutcome {
  std::string json;
  bool all_ok = false;
};

/// selector: telescoping | rtbound | dyson | lemmas | exact | all.
VerifyOutcome run_verify(const std::string& selector, int instances,
                         std::uint64_t seed);

/// Joins results.csv/history.json files from result directories into one
/// summary table.
std::string report_csv(const std::vector<std::string>& dirs);

}  // namespace olrg::cli
