// SPDX-License-Identifier: Apache-2.0
//
// Sweep orchestration behind the command-line tool. Every routine is
// deterministic for a fixed configuration; parallel execution only changes
// wall-clock columns.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "isac/config.hpp"
#include "isac/metrics.hpp"

namespace isac {

/// Outcome label of one design run. "ok" and "infeasible" are regular
/// answers; everything else counts as a solver failure.
std::string status_label(const std::exception& e);
bool is_hard_failure(const std::string& status);

struct RunRow {
  std::uint64_t seed = 0;
  double sweep_value = 0.0;
  Method method = Method::optimal;
  double secrecy_rate = 0.0;   // NaN unless status is "ok"
  double achieved_pcrb = 0.0;  // NaN unless status is "ok"
  double gamma_star = 0.0;     // NaN for methods without a gamma search
  std::string status;
  double wall_ms = 0.0;
};

struct RunOptions {
  int threads = 1;
  bool timing = true;  // false writes wall_ms as 0 for bit-identical files
};

/// Runs every seed x sweep point x method. Without a sweep, the single point
/// is gamma_pcrb. Rows are sorted by (sweep value, seed, method).
std::vector<RunRow> run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

void write_run_csv(const std::vector<RunRow>& rows, std::ostream& out, bool timing = true);

/// Per (sweep value, method): mean secrecy rate and PCRB over successful
/// rows, with infeasible rows counted as rate 0, plus status counts.
struct MeanRow {
  double sweep_value = 0.0;
  Method method = Method::optimal;
  double mean_secrecy_rate = 0.0;
  double mean_achieved_pcrb = 0.0;
  int ok = 0;
  int infeasible = 0;
  int failed = 0;
};

std::vector<MeanRow> aggregate_means(const std::vector<RunRow>& rows);
void write_means_csv(const std::vector<MeanRow>& means, std::ostream& out);

/// PCRB bounds of the full-power isotropic covariance (P / N_t) I against the
/// prior variance.
struct PcrbSweepRow {
  double sigma_theta_sq = 0.0;
  double exact = 0.0;
  double upper = 0.0;
  double approx = 0.0;
};

std::vector<PcrbSweepRow> pcrb_sweep(const ExperimentConfig& config, const std::vector<double>& sigma_values,
                                     int threads = 1);
void write_pcrb_sweep_csv(const std::vector<PcrbSweepRow>& rows, std::ostream& out);

/// Gamma curves of the optimal design for one seed, one per PCRB threshold.
struct GammaCurveRow {
  double gamma_pcrb = 0.0;
  double gamma = 0.0;
  double f_gamma = 0.0;
  double objective = 0.0;
  bool refined = false;  // the golden-section optimum rather than a grid point
};

std::vector<GammaCurveRow> gamma_curves(const ExperimentConfig& config, std::uint64_t seed,
                                        const std::vector<double>& gamma_pcrb_values, int threads = 1);
void write_gamma_curve_csv(const std::vector<GammaCurveRow>& rows, std::ostream& out);

struct FeasibilityRow {
  double gamma_pcrb = 0.0;
  double xi = 0.0;
  bool vacuous = false;
  bool feasible = false;
  double margin = 0.0;
  double min_pcrb = 0.0;  // smallest PCRB reachable with the power budget
  std::string status;
};

std::vector<FeasibilityRow> feasibility_sweep(const ExperimentConfig& config,
                                              const std::vector<double>& gamma_pcrb_values);
void write_feasibility_csv(const std::vector<FeasibilityRow>& rows, std::ostream& out);

/// Beams of `method` for one seed at the configured gamma_pcrb, as a
/// beampattern over the configured angle grid.
std::vector<BeampatternSample> method_beampattern(const ExperimentConfig& config, std::uint64_t seed, Method method);

}  // namespace isac
