// SPDX-License-Identifier: Apache-2.0
//
// Physical model of the secure sensing link: half-wavelength ULA steering
// vectors, the LoS eavesdropper channel, the discrete target-angle prior and
// its Gaussian-mixture relaxation.
//
// Antenna index n is 1-based in the array-response formulas and 0-based in
// storage, so entry i of a steering vector carries the weight (N + 1 - 2(i+1)).

#pragma once

#include <cstdint>
#include <vector>

#include "isac/types.hpp"

namespace isac {

enum class ArrayKind { tx, rx };

/// Full physical configuration. Powers and noise levels are linear milliwatts.
struct Scenario {
  int n_tx = 8;
  int n_rx = 10;
  int n_an = 7;
  std::vector<double> angles;  // candidate target angles (rad)
  std::vector<double> probs;
  double sigma_theta_sq = 1e-4;
  double path_gain = 1e-4;  // one-way target power gain beta0 / r^2
  double rcs_min_gain = 0.32;
  double noise_user = 1e-8;
  double noise_eve = 1e-8;
  double noise_radar = 1e-8;
  double power_budget = 100.0;
  cvec user_channel;

  int num_locations() const { return static_cast<int>(angles.size()); }

  /// sigma_E^2 r^2 / beta0: eavesdropper noise referred to the array output.
  double eve_noise_equivalent() const { return noise_eve / path_gain; }

  /// |beta_bar|^2 = (beta0 / r^2)^2 |alpha_bar|^2.
  double beta_bar_sq() const { return path_gain * path_gain * rcs_min_gain * rcs_min_gain; }

  /// Throws ModelError describing the first violated invariant.
  void validate() const;
};

struct Beamformer {
  cvec w;
  std::vector<cvec> an_beams;

  double total_power() const;
  cmat info_covariance() const { return w * w.adjoint(); }
  cmat an_covariance() const;
  cmat covariance() const { return info_covariance() + an_covariance(); }
};

struct CovariancePair {
  cmat info;  // W = w w^H
  cmat an;    // V = sum_j v_j v_j^H

  cmat total() const { return info + an; }
};

cvec steering_tx(double theta, int n_tx);
cvec steering_rx(double theta, int n_rx);
cvec steering_derivative(double theta, int n, ArrayKind kind);

/// Sum over antennas of the squared derivative weights, so that
/// ||d/dtheta b(theta)||^2 = cos^2(theta) * derivative_weight_energy(n).
double derivative_weight_energy(int n);

/// Elevation-projected angle for a target at azimuth psi; throws ModelError
/// when the geometry admits no real solution.
double angle_from_geometry(double psi, double h_bs, double h_target, double range_m);

cvec eavesdropper_channel(double theta, const Scenario& scenario);

double mixture_pdf(double theta, const Scenario& scenario);

/// Rayleigh user channel h ~ CN(0, sigma_h_sq I), deterministic per seed.
cvec rayleigh_user_channel(std::uint64_t seed, double sigma_h_sq, int n_tx);

}  // namespace isac
