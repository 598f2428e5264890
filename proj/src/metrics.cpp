// SPDX-License-Identifier: Apache-2.0

#include "isac/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "isac/format.hpp"

namespace isac {

namespace {

double an_leakage(const Beamformer& beams, const cvec& g) {
  double s = 0.0;
  for (const auto& v : beams.an_beams) s += std::norm(g.dot(v));
  return s;
}

double to_dbm(double mw) { return mw > 0.0 ? std::max(kDbmFloor, 10.0 * std::log10(mw)) : kDbmFloor; }

}  // namespace

double sinr_user(const Beamformer& beams, const Scenario& s) {
  const cvec& h = s.user_channel;
  return std::norm(h.dot(beams.w)) / (an_leakage(beams, h) + s.noise_user);
}

double sinr_eve(const Beamformer& beams, int k, const Scenario& s) {
  if (k < 0 || k >= s.num_locations()) throw std::out_of_range("eavesdropper location index out of range");
  const cvec a = steering_tx(s.angles[k], s.n_tx);
  return std::norm(a.dot(beams.w)) / (an_leakage(beams, a) + s.eve_noise_equivalent());
}

SecrecyRates secrecy_rate(const Beamformer& beams, const Scenario& s) {
  SecrecyRates out;
  const double user = std::log2(1.0 + sinr_user(beams, s));
  out.worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < s.num_locations(); ++k) {
    const double r = std::max(0.0, user - std::log2(1.0 + sinr_eve(beams, k, s)));
    out.per_location.push_back(r);
    out.worst = std::min(out.worst, r);
  }
  if (out.per_location.empty()) out.worst = std::max(0.0, user);
  return out;
}

std::vector<BeampatternSample> beampattern(const Beamformer& beams, const std::vector<double>& grid,
                                           double eval_path_loss_db, const Scenario& s) {
  if (grid.empty()) throw std::invalid_argument("beampattern needs a nonempty angle grid");
  const double loss = db_to_linear(-eval_path_loss_db);
  std::vector<BeampatternSample> out;
  out.reserve(grid.size());
  for (double theta : grid) {
    const cvec a = steering_tx(theta, s.n_tx);
    BeampatternSample smp;
    smp.angle = theta;
    smp.info_power_dbm = to_dbm(loss * std::norm(a.dot(beams.w)));
    smp.an_power_dbm = to_dbm(loss * an_leakage(beams, a));
    smp.prior_density = mixture_pdf(theta, s);
    out.push_back(smp);
  }
  return out;
}

std::vector<double> uniform_angle_grid(int n) {
  if (n < 1) throw std::invalid_argument("angle grid needs at least one point");
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = -kPi / 2.0 + kPi * i / n;
  return g;
}

void write_beampattern_csv(const std::vector<BeampatternSample>& samples, std::ostream& out) {
  out << "angle_rad,info_dbm,an_dbm,prior_density\n";
  for (const auto& s : samples)
    out << fmt_double(s.angle) << ',' << fmt_double(s.info_power_dbm) << ',' << fmt_double(s.an_power_dbm)
        << ',' << fmt_double(s.prior_density) << '\n';
}

}  // namespace isac
