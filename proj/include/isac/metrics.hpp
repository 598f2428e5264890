// SPDX-License-Identifier: Apache-2.0
//
// Figures of merit for a given set of beams: user and eavesdropper SINR, the
// per-location and worst-case secrecy rates, and transmit beampatterns.

#pragma once

#include <iosfwd>
#include <vector>

#include "isac/model.hpp"

namespace isac {

double sinr_user(const Beamformer& beams, const Scenario& scenario);

/// SINR at candidate location k; throws std::out_of_range for a bad index.
double sinr_eve(const Beamformer& beams, int k, const Scenario& scenario);

struct SecrecyRates {
  std::vector<double> per_location;  // [log2(1+SINR) - log2(1+SINR_E,k)]^+
  double worst = 0.0;
};

SecrecyRates secrecy_rate(const Beamformer& beams, const Scenario& scenario);

inline constexpr double kDbmFloor = -300.0;

struct BeampatternSample {
  double angle = 0.0;
  double info_power_dbm = kDbmFloor;
  double an_power_dbm = kDbmFloor;
  double prior_density = 0.0;
};

/// Power radiated toward each angle at the given path loss; zero power maps
/// to kDbmFloor. Throws std::invalid_argument for an empty grid.
std::vector<BeampatternSample> beampattern(const Beamformer& beams, const std::vector<double>& angle_grid,
                                           double eval_path_loss_db, const Scenario& scenario);

/// n uniform points over [-pi/2, pi/2).
std::vector<double> uniform_angle_grid(int n = 2048);

void write_beampattern_csv(const std::vector<BeampatternSample>& samples, std::ostream& out);

}  // namespace isac
