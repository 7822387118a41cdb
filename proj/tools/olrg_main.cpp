#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "olrg/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitVerifyFailed = 4;

void emit(const std::string& content, const std::string& path) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::vector<double> parse_time_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Operator-learning renormalization group experiment runner"};
  app.require_subcommand(1);

  // oracle
  auto* oracle = app.add_subcommand(
      "oracle", "Dense ground-truth <Z1 Z2>(T) for the transverse-field chain");
  int oracle_n = 2;
  double oracle_h = 1.0;
  std::string oracle_times = "1.0";
  std::string oracle_out;
  oracle->add_option("--n", oracle_n, "Site count (<= 12)")->required();
  oracle->add_option("--field", oracle_h, "Transverse field strength");
  oracle->add_option("--times", oracle_times, "Comma-separated time points");
  oracle->add_option("-o,--output", oracle_out, "Output CSV path (default stdout)");

  // train
  auto* train_cmd = app.add_subcommand("train", "Run a configured training");
  std::string train_config;
  std::string train_out;
  train_cmd->add_option("--config", train_config, "TOML config path")->required();
  train_cmd->add_option("--output", train_out, "Override the output directory");

  // tobc
  auto* tobc_cmd = app.add_subcommand(
      "tobc", "Dump the full correlator grid for the configured system");
  std::string tobc_config;
  int tobc_order = 0;
  int tobc_grid = 0;
  std::string tobc_out;
  tobc_cmd->add_option("--config", tobc_config, "TOML config path")->required();
  tobc_cmd->add_option("--order", tobc_order, "Correlator order")->required();
  tobc_cmd->add_option("--grid", tobc_grid, "Override the checkpoint count");
  tobc_cmd->add_option("-o,--output", tobc_out, "Output CSV path");

  // verify
  auto* verify_cmd =
      app.add_subcommand("verify", "Run the inequality/identity batteries");
  std::string verify_suite;
  int verify_instances = 0;
  std::uint64_t verify_seed = 20240901;
  std::string verify_out;
  verify_cmd->add_option("--suite", verify_suite,
                         "telescoping|rtbound|dyson|lemmas|exact|all");
  verify_cmd->add_option("--instances", verify_instances,
                         "Instance count override");
  verify_cmd->add_option("--seed", verify_seed, "Battery seed");
  verify_cmd->add_option("-o,--output", verify_out, "Output JSON path");

  // report
  auto* report_cmd =
      app.add_subcommand("report", "Join result directories into one table");
  std::vector<std::string> report_dirs;
  std::string report_out;
  report_cmd->add_option("dirs", report_dirs, "Result directories")->required();
  report_cmd->add_option("-o,--output", report_out, "Output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*oracle) {
      const auto rows = olrg::cli::run_oracle(oracle_n, oracle_h,
                                              parse_time_list(oracle_times));
      emit(olrg::cli::oracle_csv(rows), oracle_out);
      return kExitOk;
    }
    if (*train_cmd) {
      const auto cfg = olrg::cli::parse_config_file(train_config);
      olrg::cli::run_train(cfg, train_out);
      return kExitOk;
    }
    if (*tobc_cmd) {
      const auto cfg = olrg::cli::parse_config_file(tobc_config);
      emit(olrg::cli::tobc_csv(cfg, tobc_order, tobc_grid), tobc_out);
      return kExitOk;
    }
    if (*verify_cmd) {
      if (verify_suite.empty()) {
        std::cerr << "verify: --suite is required "
                     "(telescoping|rtbound|dyson|lemmas|exact|all)\n";
        return kExitConfig;
      }
      const auto outcome =
          olrg::cli::run_verify(verify_suite, verify_instances, verify_seed);
      emit(outcome.json, verify_out);
      return outcome.all_ok ? kExitOk : kExitVerifyFailed;
    }
    if (*report_cmd) {
      emit(olrg::cli::report_csv(report_dirs), report_out);
      return kExitOk;
    }
  } catch (const olrg::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitOk;
}
