// SPDX-License-Identifier: Apache-2.0
//
// isac: experiment driver for the secure sensing beamformer.
//
//   isac run          --config cfg.json --out DIR   results.csv + means.csv
//   isac pcrb-sweep   ...                           pcrb_sweep.csv
//   isac beampattern  ... --gamma-pcrb 3e-5         beampattern_<method>.csv
//   isac gamma-curve  ...                           gamma_curve.csv
//   isac feasibility  ...                           feasibility.csv
//
// Exit status: 0 on success, 2 on a configuration error, 3 when any solve
// failed for a reason other than infeasibility.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "isac/config.hpp"
#include "isac/experiments.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  int seed_count = 0;
  std::vector<std::string> methods;
  int threads = 1;
  std::optional<double> gamma_pcrb;
  bool no_timing = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON experiment configuration (builtin scenario when omitted)");
  cmd->add_option("--out", f.out_dir, "output directory (overrides the config)");
  cmd->add_option("--seed-count", f.seed_count, "use seeds 1..N")->check(CLI::PositiveNumber);
  cmd->add_option("--method", f.methods, "comma-separated subset of optimal,sub1,sub2,upper_bound")->delimiter(',');
  cmd->add_option("--threads", f.threads, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--gamma-pcrb", f.gamma_pcrb, "PCRB threshold (overrides the config)")->check(CLI::PositiveNumber);
  cmd->add_flag("--no-timing", f.no_timing, "write wall_ms as 0 so output is bit-identical across runs");
}

isac::ExperimentConfig resolve(const CommonFlags& f) {
  isac::ExperimentConfig c = f.config_path.empty() ? isac::builtin_scenario() : isac::load_config(f.config_path);
  if (!f.out_dir.empty()) c.output = f.out_dir;
  if (f.seed_count > 0) {
    c.seeds.clear();
    for (int i = 1; i <= f.seed_count; ++i) c.seeds.push_back(static_cast<std::uint64_t>(i));
  }
  if (!f.methods.empty()) {
    c.methods.clear();
    for (const auto& m : f.methods) c.methods.push_back(isac::parse_method(m));
  }
  if (f.gamma_pcrb) c.gamma_pcrb = *f.gamma_pcrb;
  c.optimizer.search.threads = f.threads;
  c.validate();
  return c;
}

std::ofstream open_output(const isac::ExperimentConfig& c, const std::string& name) {
  std::filesystem::create_directories(c.output);
  const auto path = std::filesystem::path(c.output) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  std::cerr << "writing " << path.string() << '\n';
  return out;
}

// PCRB thresholds for commands that take a list of them.
std::vector<double> gamma_pcrb_values(const isac::ExperimentConfig& c) {
  if (c.sweep && c.sweep->variable == isac::SweepVariable::gamma_pcrb) return c.sweep->values;
  return {c.gamma_pcrb};
}

int cmd_run(const isac::ExperimentConfig& c, const CommonFlags& f) {
  const auto rows = isac::run_experiment(c, {f.threads, !f.no_timing});
  {
    auto out = open_output(c, "results.csv");
    isac::write_run_csv(rows, out, !f.no_timing);
  }
  {
    auto out = open_output(c, "means.csv");
    isac::write_means_csv(isac::aggregate_means(rows), out);
  }
  int failures = 0;
  for (const auto& r : rows)
    if (isac::is_hard_failure(r.status)) ++failures;
  if (failures > 0) {
    std::cerr << failures << " of " << rows.size() << " runs failed\n";
    return kExitSolver;
  }
  return 0;
}

int cmd_pcrb_sweep(const isac::ExperimentConfig& c, const CommonFlags& f) {
  std::vector<double> sigmas = isac::sweep_values(1e-6, 1e-3, 31, true);
  if (c.sweep && c.sweep->variable == isac::SweepVariable::sigma_theta_sq) sigmas = c.sweep->values;
  auto out = open_output(c, "pcrb_sweep.csv");
  isac::write_pcrb_sweep_csv(isac::pcrb_sweep(c, sigmas, f.threads), out);
  return 0;
}

int cmd_beampattern(const isac::ExperimentConfig& c, const CommonFlags&) {
  for (isac::Method m : c.methods) {
    const auto samples = isac::method_beampattern(c, c.seeds.front(), m);
    auto out = open_output(c, "beampattern_" + isac::to_string(m) + ".csv");
    isac::write_beampattern_csv(samples, out);
  }
  return 0;
}

int cmd_gamma_curve(const isac::ExperimentConfig& c, const CommonFlags& f) {
  const auto rows = isac::gamma_curves(c, c.seeds.front(), gamma_pcrb_values(c), f.threads);
  auto out = open_output(c, "gamma_curve.csv");
  isac::write_gamma_curve_csv(rows, out);
  return 0;
}

int cmd_feasibility(const isac::ExperimentConfig& c, const CommonFlags&) {
  const auto rows = isac::feasibility_sweep(c, gamma_pcrb_values(c));
  {
    auto out = open_output(c, "feasibility.csv");
    isac::write_feasibility_csv(rows, out);
  }
  for (const auto& r : rows)
    if (isac::is_hard_failure(r.status)) return kExitSolver;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secure sensing beamforming experiments"};
  app.require_subcommand(1);
  CommonFlags flags;

  struct Command {
    const char* name;
    const char* help;
    int (*fn)(const isac::ExperimentConfig&, const CommonFlags&);
    CLI::App* app = nullptr;
  };
  std::vector<Command> commands{
      {"run", "secrecy rate of each method over seeds and the sweep", cmd_run},
      {"pcrb-sweep", "exact, upper and approximate PCRB versus prior variance", cmd_pcrb_sweep},
      {"beampattern", "transmit beampattern of each method for the first seed", cmd_beampattern},
      {"gamma-curve", "objective versus eavesdropper SINR cap for the first seed", cmd_gamma_curve},
      {"feasibility", "whether each PCRB threshold is reachable", cmd_feasibility},
  };
  for (auto& c : commands) {
    c.app = app.add_subcommand(c.name, c.help);
    add_common(c.app, flags);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  isac::ExperimentConfig config;
  try {
    config = resolve(flags);
  } catch (const isac::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    for (const auto& c : commands)
      if (c.app->parsed()) return c.fn(config, flags);
  } catch (const isac::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolver;
  }
  return 0;
}
