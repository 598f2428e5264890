// SPDX-License-Identifier: Apache-2.0
//
// JSON experiment configuration. Powers are given in dBm and gains in dB at
// this boundary and stored as linear milliwatts / linear gains.
//
//   {
//     "scenario": {
//       "n_tx": 8, "n_rx": 10, "n_an": 7,
//       "angles_rad": [-1.22, -0.79, -0.44, 0.87], "probs": [0.2, 0.1, 0.4, 0.3],
//       "sigma_theta_sq": 1e-4, "target_path_loss_db": 40, "rcs_min_gain": 0.32,
//       "noise_user_dbm": -80, "noise_eve_dbm": -80, "noise_radar_dbm": -80,
//       "power_budget_dbm": 20, "user_channel_gain_db": -80
//     },
//     "quadrature": {"nodes_per_component": 64, "half_width_sigmas": 8, "rel_tol": 1e-8},
//     "gamma_search": {"grid_points": 60, "gamma_min": 1e-4, "gamma_max": 0, "golden_rel_tol": 1e-4},
//     "solver": {"tol": 1e-8, "max_iterations": 200},
//     "sub2_grid_points": 512,
//     "gamma_pcrb": 3e-5,
//     "sweep": {"variable": "gamma_pcrb", "from": 1e-5, "to": 2e-4, "spacing": "log", "points": 8},
//     "methods": ["optimal", "sub1", "sub2"],
//     "seeds": [1, 2, 3],
//     "output": "results"
//   }
//
// Every key is optional. A sweep may list "values" instead of a range. The
// power_budget sweep variable is in dBm.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "isac/model.hpp"
#include "isac/optimizer.hpp"
#include "isac/pcrb.hpp"
#include "isac/quadrature.hpp"

namespace isac {

/// Bad configuration; the message names the offending field or the line and
/// column of a syntax error.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Method { optimal, sub1, sub2, upper_bound };

std::string to_string(Method m);
Method parse_method(std::string_view name);  // throws ConfigError

enum class SweepVariable { sigma_theta_sq, gamma_pcrb, power_budget, gamma };

std::string to_string(SweepVariable v);

struct SweepSpec {
  SweepVariable variable = SweepVariable::gamma_pcrb;
  std::vector<double> values;
};

struct ExperimentConfig {
  Scenario scenario;  // user_channel is drawn per seed unless fixed below
  double user_channel_gain = 1e-8;  // sigma_h^2
  std::optional<cvec> fixed_user_channel;
  QuadratureConfig quadrature;
  Rho0Convention rho0 = Rho0Convention::symmetric;
  OptimizerOptions optimizer;
  double gamma_pcrb = 3e-5;
  std::optional<SweepSpec> sweep;
  std::vector<Method> methods{Method::optimal, Method::sub1, Method::sub2};
  std::vector<std::uint64_t> seeds;
  std::string output = "results";
  double eval_path_loss_db = 80.0;
  int angle_grid_points = 2048;

  /// Throws ConfigError on the first violated invariant.
  void validate() const;

  /// Scenario with the user channel for `seed`.
  Scenario scenario_for(std::uint64_t seed) const;
};

/// The reference setup: 8x10 array, four candidate angles, 20 dBm budget,
/// 40 dB target path loss, -80 dBm noise everywhere, 50 seeds.
ExperimentConfig builtin_scenario();

/// Parses on top of builtin_scenario(); keys absent from the document keep
/// their builtin values.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::string& path);

std::vector<double> sweep_values(double from, double to, int points, bool log_spacing);

}  // namespace isac
