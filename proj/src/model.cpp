// SPDX-License-Identifier: Apache-2.0

#include "isac/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace isac {

namespace {

// Phase weight pi (N + 1 - 2n) / 2 for the 0-based storage index i.
double phase_weight(int n, int i) { return kPi * (n + 1 - 2 * (i + 1)) / 2.0; }

cvec ula_response(double theta, int n) {
  cvec v(n);
  const double s = std::sin(theta);
  for (int i = 0; i < n; ++i) v(i) = std::polar(1.0, phase_weight(n, i) * s);
  return v;
}

}  // namespace

void Scenario::validate() const {
  std::ostringstream err;
  if (n_tx < 1) err << "n_tx must be positive";
  else if (n_rx < 1) err << "n_rx must be positive";
  else if (n_an < 1 || n_an > n_tx) err << "n_an must lie in [1, n_tx]";
  else if (angles.empty()) err << "at least one candidate angle is required";
  else if (angles.size() != probs.size()) err << "angles and probs differ in length";
  else if (!(sigma_theta_sq > 0.0)) err << "sigma_theta_sq must be positive";
  else if (!(path_gain > 0.0) || !(rcs_min_gain > 0.0)) err << "path gain and rcs gain must be positive";
  else if (!(noise_user > 0.0) || !(noise_eve > 0.0) || !(noise_radar > 0.0))
    err << "noise levels must be positive";
  else if (!(power_budget > 0.0)) err << "power_budget must be positive";
  else if (user_channel.size() != n_tx) err << "user_channel must have n_tx entries";
  if (!err.str().empty()) throw ModelError(err.str());

  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw ModelError("probabilities must lie in [0, 1]");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ModelError("probabilities must sum to 1");

  for (std::size_t k = 0; k < angles.size(); ++k) {
    if (!(angles[k] >= -kPi / 2 && angles[k] < kPi / 2))
      throw ModelError("angle " + std::to_string(angles[k]) + " outside [-pi/2, pi/2)");
    for (std::size_t n = 0; n < k; ++n)
      if (angles[n] == angles[k]) throw ModelError("candidate angles must be distinct");
  }

  const double h_norm = user_channel.norm();
  if (!(h_norm > 0.0)) throw ModelError("user channel is zero");
  for (double theta : angles) {
    const cvec a = steering_tx(theta, n_tx);
    const cvec residual = user_channel - a * (a.adjoint() * user_channel)(0) / a.squaredNorm();
    if (residual.norm() <= 1e-9 * h_norm)
      throw ModelError("user channel is collinear with a candidate eavesdropper channel");
  }
}

double Beamformer::total_power() const {
  double p = w.squaredNorm();
  for (const auto& v : an_beams) p += v.squaredNorm();
  return p;
}

cmat Beamformer::an_covariance() const {
  cmat out = cmat::Zero(w.size(), w.size());
  for (const auto& v : an_beams) out += v * v.adjoint();
  return out;
}

cvec steering_tx(double theta, int n_tx) { return ula_response(theta, n_tx); }

// b(theta) is listed as the conjugate transpose of a row of negative phases,
// which yields the same positive-phase column as a(theta).
cvec steering_rx(double theta, int n_rx) { return ula_response(theta, n_rx); }

cvec steering_derivative(double theta, int n, ArrayKind /*kind*/) {
  cvec d = ula_response(theta, n);
  const double c = std::cos(theta);
  for (int i = 0; i < n; ++i) d(i) *= cdouble(0.0, phase_weight(n, i) * c);
  return d;
}

double derivative_weight_energy(int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += phase_weight(n, i) * phase_weight(n, i);
  return s;
}

double angle_from_geometry(double psi, double h_bs, double h_target, double range_m) {
  if (!(range_m > 0.0)) throw ModelError("range must be positive");
  const double arg = std::sin(psi) * (h_bs - h_target) / range_m;
  if (std::abs(arg) > 1.0) throw ModelError("arcsin argument outside [-1, 1]");
  return std::asin(arg);
}

cvec eavesdropper_channel(double theta, const Scenario& scenario) {
  return std::sqrt(scenario.path_gain) * steering_tx(theta, scenario.n_tx);
}

double mixture_pdf(double theta, const Scenario& scenario) {
  const double var = scenario.sigma_theta_sq;
  const double norm = 1.0 / std::sqrt(2.0 * kPi * var);
  double p = 0.0;
  for (std::size_t k = 0; k < scenario.angles.size(); ++k) {
    const double d = theta - scenario.angles[k];
    p += scenario.probs[k] * norm * std::exp(-d * d / (2.0 * var));
  }
  return p;
}

cvec rayleigh_user_channel(std::uint64_t seed, double sigma_h_sq, int n_tx) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double scale = std::sqrt(sigma_h_sq / 2.0);
  cvec h(n_tx);
  for (int i = 0; i < n_tx; ++i) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    h(i) = scale * cdouble(re, im);
  }
  return h;
}

}  // namespace isac
