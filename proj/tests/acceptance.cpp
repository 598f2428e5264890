// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "isac/config.hpp"
#include "isac/metrics.hpp"
#include "isac/optimizer.hpp"
#include "isac/pcrb.hpp"
#include "isac/sdp.hpp"

using namespace isac;

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string format(const char* fmt, ...) {
  char buf[1024];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return buf;
}

// Largest solver residual seen on any optimal exit.
double g_max_residual = 0.0;

void track(const OptimizationResult& r) { g_max_residual = std::max(g_max_residual, r.max_solver_residual); }
void track(const sdp::SdpSolution& s) {
  if (s.status == sdp::Status::optimal)
    g_max_residual = std::max({g_max_residual, s.primal_residual, s.dual_residual, s.gap});
}

struct Verdict {
  bool pass = true;
  std::string detail;
};

int g_failures = 0;

void report(int id, const char* name, const Verdict& v) {
  std::printf("criterion %2d %s  %s: %s\n", id, v.pass ? "PASS" : "FAIL", name, v.detail.c_str());
  std::fflush(stdout);
  if (!v.pass) ++g_failures;
}

cmat random_psd(std::mt19937_64& rng, int n, double trace, int rank) {
  std::normal_distribution<double> g;
  cmat b(n, rank);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < rank; ++j) b(i, j) = cdouble(g(rng), g(rng));
  cmat m = b * b.adjoint();
  return m * (trace / m.trace().real());
}

const std::array<double, 4> kGammaPcrb{1e-5, 3e-5, 7e-5, 2e-4};
constexpr int kSeeds = 20;

// Designs shared by several criteria, keyed by (seed, gamma_pcrb index).
struct Designs {
  std::map<std::pair<int, int>, std::optional<OptimizationResult>> optimal, sub1, sub2;
  std::map<int, OptimizationResult> upper;
  double optimal_seconds_7e5 = 0.0;
};

std::optional<OptimizationResult> attempt(const std::function<OptimizationResult()>& fn) {
  try {
    OptimizationResult r = fn();
    track(r);
    return r;
  } catch (const OptimizerError& e) {
    if (e.kind() == OptimizerError::Kind::infeasible) return std::nullopt;
    throw;
  }
}

double rate_or_zero(const std::optional<OptimizationResult>& r) { return r ? r->worst_secrecy_rate : 0.0; }

// ---------------------------------------------------------------------------

Verdict criterion_bound_sandwich(const ExperimentConfig& cfg) {
  const auto t0 = clock_type::now();
  const std::vector<double> sigmas = sweep_values(1e-6, 1e-3, 31, true);
  int violations = 0;
  double approx_gap = -1.0;
  for (double sig : sigmas) {
    Scenario s = cfg.scenario_for(1);
    s.sigma_theta_sq = sig;
    const SensingMatrices m = compute_sensing_matrices(s, cfg.quadrature, cfg.rho0);
    const cmat r = cmat::Identity(s.n_tx, s.n_tx) * (s.power_budget / s.n_tx);
    const double exact = pcrb_exact(r, m, s), upper = pcrb_upper(r, m, s);
    if (!(exact <= upper + 1e-12)) ++violations;
  }
  {
    const Scenario s = cfg.scenario_for(1);
    const SensingMatrices m = compute_sensing_matrices(s, cfg.quadrature, cfg.rho0);
    const cmat r = cmat::Identity(s.n_tx, s.n_tx) * (s.power_budget / s.n_tx);
    const double upper = pcrb_upper(r, m, s);
    approx_gap = std::abs(pcrb_approx(r, m, s) - upper) / upper;
  }
  const double secs = seconds_since(t0);
  Verdict v;
  v.pass = violations == 0 && approx_gap <= 0.15 && secs < 30.0;
  v.detail = format("%d/%zu points with exact > upper; approx gap at 1e-4 = %.4f (<= 0.15); %.2f s", violations,
                    sigmas.size(), approx_gap, secs);
  return v;
}

Verdict criterion_fim_consistency(const ExperimentConfig& cfg) {
  const auto t0 = clock_type::now();
  const Scenario s = cfg.scenario_for(1);
  const SensingMatrices m = compute_sensing_matrices(s, cfg.quadrature, cfg.rho0);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> phase(-kPi, kPi);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const cmat r = random_psd(rng, s.n_tx, s.power_budget, 1 + t % s.n_tx);
    const cdouble beta = std::sqrt(m.beta_bar_sq) * std::polar(1.0, phase(rng));
    const double inv = fim_blocks(r, beta, s, cfg.quadrature).inverse()(0, 0);
    const double exact = pcrb_exact(r, m, s);
    worst = std::max(worst, std::abs(inv - exact) / exact);
  }
  const double secs = seconds_since(t0);
  Verdict v;
  v.pass = worst <= 1e-8 && secs < 60.0;
  v.detail = format("max relative difference %.3e over 100 covariances (<= 1e-8); %.2f s", worst, secs);
  return v;
}

Verdict criterion_sdr_tightness(const ExperimentConfig& cfg) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> log_gamma(std::log(1e-3), std::log(1e2));
  int solved = 0, attempts = 0;
  double worst_violation = 0.0, worst_objective = 0.0;
  for (int seed = 1; solved < 50 && attempts < 200; ++seed) {
    const Scenario s = cfg.scenario_for(static_cast<std::uint64_t>(seed));
    const SensingMatrices m = compute_sensing_matrices(s, cfg.quadrature, cfg.rho0);
    for (double gp : {3e-5, 7e-5}) {
      ++attempts;
      const double gamma = std::exp(log_gamma(rng));
      const InnerSolution in = solve_inner(gamma, s, m, gp, cfg.optimizer);
      track(in.sdp);
      if (in.sdp.status != sdp::Status::optimal) continue;
      const InnerProblem ip = make_inner_problem(gamma, s, m, gp, cfg.optimizer);
      const cvec hbar = s.user_channel * std::sqrt(s.power_budget / s.noise_user);
      const ReducedPair red = rank_one_reduce(in.w, in.v, hbar);
      worst_violation = std::max(worst_violation, inner_violation(ip, red.w, red.v, in.t));
      const double reduced = trace_inner(ip.h_bar, red.w);
      worst_objective = std::max(worst_objective, std::abs(reduced - in.sdp.objective) / std::abs(in.sdp.objective));
      ++solved;
    }
  }
  Verdict v;
  v.pass = solved == 50 && worst_violation <= 1e-7 && worst_objective <= 1e-9;
  v.detail = format("%d instances; max constraint violation %.3e (<= 1e-7); max objective mismatch %.3e (<= 1e-9)",
                    solved, worst_violation, worst_objective);
  return v;
}

// Two-antenna, single-location instance and its brute-force oracle.
struct SmallInstance {
  Scenario s;
  SensingMatrices m;
  double gamma_pcrb = 0.0;
};

SmallInstance make_small(std::uint64_t seed) {
  std::mt19937_64 rng(seed * 7919);
  std::uniform_real_distribution<double> angle(-1.2, 1.2);
  SmallInstance inst;
  Scenario& s = inst.s;
  s.n_tx = 2;
  s.n_rx = 2;
  s.n_an = 1;
  s.angles = {angle(rng)};
  s.probs = {1.0};
  s.sigma_theta_sq = 1e-4;
  s.path_gain = 1e-4;
  s.rcs_min_gain = 0.32;
  s.noise_user = s.noise_eve = s.noise_radar = 1e-8;
  s.power_budget = 100.0;
  s.user_channel = rayleigh_user_channel(seed, 1e-8, 2);
  inst.m = compute_sensing_matrices(s);
  // Threshold between the best reachable bound and the prior-only one, close
  // to the floor on even seeds.
  const double floor = max_sensing_information(s, inst.m).min_pcrb;
  const double prior = pcrb_exact(cmat::Zero(2, 2), inst.m, s);
  inst.gamma_pcrb = floor + (seed % 2 == 0 ? 0.01 : 0.5) * (prior - floor);
  return inst;
}

struct Direction {
  double alpha = 0.0, phi = 0.0;
  double user = 0.0, eve = 0.0;  // |h^H u|^2, |a^H u|^2
  double m1 = 0.0, m2 = 0.0;
  cdouble m3;
};

// Unit vector cos(alpha) e0 + sin(alpha) e^{j phi} e1 in an orthonormal basis.
struct Basis {
  cvec e0, e1;
};

// Basis whose first vector is orthogonal to x, so that exact nulls towards x
// are grid points.
Basis null_basis(const cvec& x) {
  const cvec e1 = x.normalized();
  cvec e0(2);
  e0 << -std::conj(e1(1)), std::conj(e1(0));
  return {e0, e1};
}

Direction direction(const SmallInstance& inst, const Basis& basis, double alpha, double phi) {
  const cvec u = std::cos(alpha) * basis.e0 + std::sin(alpha) * std::polar(1.0, phi) * basis.e1;
  const cvec a = steering_tx(inst.s.angles[0], 2);
  Direction d;
  d.alpha = alpha;
  d.phi = phi;
  d.user = std::norm(inst.s.user_channel.dot(u));
  d.eve = std::norm(a.dot(u));
  d.m1 = u.dot(inst.m.m1 * u).real();
  d.m2 = u.dot(inst.m.m2 * u).real();
  d.m3 = u.dot(inst.m.m3 * u);
  return d;
}

struct Candidate {
  double score = -1.0;  // (1 + SINR) / (1 + SINR_E), or -1 when infeasible
  double alpha_w = 0, phi_w = 0, alpha_v = 0, phi_v = 0, rho = 0, tau = 0;
};

// Secrecy ratio of the beams (sqrt(p) u_w, sqrt(q) u_v) with p = tau rho P and
// q = tau (1 - rho) P; -1 when the PCRB threshold is missed.
double score(const SmallInstance& inst, double xi, const Direction& w, const Direction& v, double rho, double tau) {
  const double p = tau * rho * inst.s.power_budget, q = tau * (1 - rho) * inst.s.power_budget;
  const double t1 = p * w.m1 + q * v.m1;
  const double info = p * w.m2 + q * v.m2 - (t1 > 0 ? std::norm(p * w.m3 + q * v.m3) / t1 : 0.0);
  if (xi > 0 && info < xi) return -1.0;
  const double su = p * w.user / (q * v.user + inst.s.noise_user);
  const double se = p * w.eve / (q * v.eve + inst.s.eve_noise_equivalent());
  return (1 + su) / (1 + se);
}

double grid_oracle(const SmallInstance& inst) {
  const double xi = xi_threshold(inst.gamma_pcrb, inst.m, inst.s);
  auto axis = [](double lo, double hi, double step) {
    std::vector<double> v;
    for (double x = lo; x <= hi + 1e-12; x += step) v.push_back(x);
    return v;
  };
  // Coarse pass at 0.1, keeping the best few candidates.
  // Information beams are measured from the eavesdropper null, noise beams
  // from the user null.
  const Basis wb = null_basis(steering_tx(inst.s.angles[0], 2));
  const Basis vb = null_basis(inst.s.user_channel);
  std::vector<Direction> wdirs, vdirs;
  for (double al : axis(0, kPi / 2, 0.1))
    for (double ph : axis(0, 2 * kPi - 0.1, 0.1)) {
      wdirs.push_back(direction(inst, wb, al, ph));
      vdirs.push_back(direction(inst, vb, al, ph));
    }
  const std::vector<double> frac = axis(0, 1, 0.1);
  std::vector<Candidate> top;
  const std::size_t keep = 40;
  for (const Direction& w : wdirs)
    for (const Direction& v : vdirs)
      for (double rho : frac)
        for (double tau : frac) {
          const double sc = score(inst, xi, w, v, rho, tau);
          if (top.size() < keep || sc > top.back().score) {
            Candidate c{sc, w.alpha, w.phi, v.alpha, v.phi, rho, tau};
            top.insert(std::upper_bound(top.begin(), top.end(), c,
                                        [](const Candidate& x, const Candidate& y) { return x.score > y.score; }),
                       c);
            if (top.size() > keep) top.pop_back();
          }
        }
  // Local passes around the survivors, each ten times finer than the last.
  auto by_score = [](const Candidate& x, const Candidate& y) { return x.score > y.score; };
  for (double step : {1e-2, 1e-3, 1e-4, 1e-5}) {
    const std::vector<double> off = axis(-5 * step, 5 * step, step);
    std::vector<Candidate> next;
    for (const Candidate& c : top) {
      std::vector<Direction> wd, vd;
      for (double da : off)
        for (double dp : off) {
          wd.push_back(direction(inst, wb, std::clamp(c.alpha_w + da, 0.0, kPi / 2), c.phi_w + dp));
          vd.push_back(direction(inst, vb, std::clamp(c.alpha_v + da, 0.0, kPi / 2), c.phi_v + dp));
        }
      Candidate local = c;
      for (const Direction& w : wd)
        for (const Direction& v : vd)
          for (double dr : off)
            for (double dt : off) {
              const double rho = std::clamp(c.rho + dr, 0.0, 1.0), tau = std::clamp(c.tau + dt, 0.0, 1.0);
              const double sc = score(inst, xi, w, v, rho, tau);
              if (sc > local.score) local = {sc, w.alpha, w.phi, v.alpha, v.phi, rho, tau};
            }
      next.push_back(local);
    }
    std::sort(next.begin(), next.end(), by_score);
    next.resize(std::min<std::size_t>(next.size(), 8));
    top = std::move(next);
  }
  const double best = std::max(1.0, top.front().score);
  return std::log2(best);
}

Verdict criterion_small_instance(const ExperimentConfig& cfg) {
  const auto t0 = clock_type::now();
  double worst = 0.0;
  int failures = 0;
  std::string note;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const SmallInstance inst = make_small(seed);
    double rate = 0.0;
    try {
      const OptimizationResult r = optimize_optimal(inst.s, inst.m, inst.gamma_pcrb, cfg.optimizer);
      track(r);
      rate = r.worst_secrecy_rate;
    } catch (const std::exception& e) {
      ++failures;
      note = format("; seed %d: %s", static_cast<int>(seed), e.what());
      continue;
    }
    const double oracle = grid_oracle(inst);
    if (std::getenv("ISAC_ACCEPTANCE_VERBOSE"))
      std::fprintf(stderr, "small seed %d: two-stage %.6f oracle %.6f gamma_pcrb %.6e\n", static_cast<int>(seed), rate,
                   oracle, inst.gamma_pcrb);
    worst = std::max(worst, std::abs(rate - oracle));
  }
  const double secs = seconds_since(t0);
  Verdict v;
  v.pass = failures == 0 && worst <= 1e-2 && secs < 300.0;
  v.detail = format("max |two-stage - grid oracle| = %.2e bits over 10 instances (<= 1e-2); %d errors; %.1f s%s", worst,
                    failures, secs, note.c_str());
  return v;
}

Designs build_designs(const ExperimentConfig& cfg) {
  Designs d;
  for (int seed = 1; seed <= kSeeds; ++seed) {
    const Scenario s = cfg.scenario_for(static_cast<std::uint64_t>(seed));
    const SensingMatrices m = compute_sensing_matrices(s, cfg.quadrature, cfg.rho0);
    for (int g = 0; g < static_cast<int>(kGammaPcrb.size()); ++g) {
      const double gp = kGammaPcrb[g];
      const auto t0 = clock_type::now();
      d.optimal[{seed, g}] = attempt([&] { return optimize_optimal(s, m, gp, cfg.optimizer); });
      if (gp == 7e-5) d.optimal_seconds_7e5 += seconds_since(t0);
      d.sub1[{seed, g}] = attempt([&] { return optimize_suboptimal1(s, m, gp, cfg.optimizer); });
      const auto& s1 = d.sub1[{seed, g}];
      d.sub2[{seed, g}] = s1 ? attempt([&] { return optimize_suboptimal2(s, m, gp, *s1, cfg.optimizer); })
                             : std::optional<OptimizationResult>{};
    }
    d.upper[seed] = secrecy_upper_bound(s, m, cfg.optimizer);
    track(d.upper[seed]);
  }
  return d;
}

Verdict criterion_method_ordering(const Designs& d) {
  const int ng = static_cast<int>(kGammaPcrb.size());
  std::vector<double> opt(ng), s1(ng), s2(ng);
  for (int g = 0; g < ng; ++g) {
    for (int seed = 1; seed <= kSeeds; ++seed) {
      opt[g] += rate_or_zero(d.optimal.at({seed, g})) / kSeeds;
      s1[g] += rate_or_zero(d.sub1.at({seed, g})) / kSeeds;
      s2[g] += rate_or_zero(d.sub2.at({seed, g})) / kSeeds;
    }
  }
  double ub = 0.0;
  for (const auto& [seed, r] : d.upper) ub += r.worst_secrecy_rate / kSeeds;

  bool ok = true;
  std::string detail;
  for (int g = 0; g < ng; ++g) {
    ok = ok && opt[g] >= s1[g] - 1e-6 && s1[g] >= 0.0 && opt[g] >= s2[g] - 1e-6;
    if (g > 0) ok = ok && opt[g] >= opt[g - 1] - 1e-6 && s1[g] >= s1[g - 1] - 1e-6 && s2[g] >= s2[g - 1] - 1e-6;
    detail += format("G=%.0e opt %.4f sub1 %.4f sub2 %.4f; ", kGammaPcrb[g], opt[g], s1[g], s2[g]);
  }
  const bool near_ub = ub - opt[ng - 1] <= 0.05 && ub >= opt[ng - 1] - 1e-6;
  detail += format("upper bound %.4f", ub);
  Verdict v;
  v.pass = ok && near_ub;
  v.detail = detail;
  return v;
}

Verdict criterion_gamma_curve(const ExperimentConfig& cfg) {
  const Scenario s = cfg.scenario_for(1);
  const SensingMatrices m = compute_sensing_matrices(s, cfg.quadrature, cfg.rho0);
  bool ok = true;
  std::string detail;
  double last_star = std::numeric_limits<double>::infinity();
  for (double gp : kGammaPcrb) {
    GammaCurve c;
    try {
      c = gamma_curve(s, m, gp, cfg.optimizer);
    } catch (const OptimizerError& e) {
      ok = false;
      detail += format("G=%.0e no curve (%s); ", gp, to_string(e.kind()).c_str());
      continue;
    }
    std::size_t arg = 0;
    for (std::size_t i = 1; i < c.grid.size(); ++i)
      if (c.grid[i].objective > c.grid[arg].objective) arg = i;
    const bool interior = arg > 0 && arg + 1 < c.grid.size();
    const bool decreasing = c.best.gamma <= last_star * (1 + 1e-3);
    ok = ok && interior && decreasing;
    last_star = c.best.gamma;
    detail += format("G=%.0e argmax %zu/%zu gamma* %.4f; ", gp, arg, c.grid.size() - 1, c.best.gamma);
  }
  Verdict v;
  v.pass = ok;
  v.detail = detail;
  return v;
}

Verdict criterion_power_gain(const ExperimentConfig& cfg, const Designs& d) {
  const auto t0 = clock_type::now();
  const int g7 = 2;
  double target = 0.0;
  for (int seed = 1; seed <= kSeeds; ++seed) target += rate_or_zero(d.optimal.at({seed, g7})) / kSeeds;

  std::vector<Scenario> scen;
  std::vector<SensingMatrices> mats;
  for (int seed = 1; seed <= kSeeds; ++seed) {
    scen.push_back(cfg.scenario_for(static_cast<std::uint64_t>(seed)));
    mats.push_back(compute_sensing_matrices(scen.back(), cfg.quadrature, cfg.rho0));
  }
  auto mean_rate = [&](bool second, double dbm) {
    double sum = 0.0;
    for (int i = 0; i < kSeeds; ++i) {
      Scenario s = scen[i];
      s.power_budget = db_to_linear(dbm);
      const auto r1 = attempt([&] { return optimize_suboptimal1(s, mats[i], 7e-5, cfg.optimizer); });
      if (!second) {
        sum += rate_or_zero(r1);
        continue;
      }
      if (!r1) continue;
      sum += rate_or_zero(attempt([&] { return optimize_suboptimal2(s, mats[i], 7e-5, *r1, cfg.optimizer); }));
    }
    return sum / kSeeds;
  };
  const double base = linear_to_db(cfg.scenario.power_budget);
  auto needed = [&](bool second) {
    double lo = base, hi = base + 30.0;
    if (mean_rate(second, hi) < target) return std::numeric_limits<double>::infinity();
    if (mean_rate(second, lo) >= target) return lo;
    while (hi - lo > 1e-3) {
      const double mid = 0.5 * (lo + hi);
      (mean_rate(second, mid) >= target ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
  };
  const double gain1 = needed(false) - base, gain2 = needed(true) - base;
  const double secs = seconds_since(t0) + d.optimal_seconds_7e5;
  Verdict v;
  v.pass = gain1 >= 0.3 && gain1 <= 3.0 && gain2 >= 4.0 && secs < 1200.0;
  v.detail = format("optimal mean %.4f bits at %.0f dBm; sub1 needs +%.2f dB (0.3 to 3); sub2 needs +%.2f dB (>= 4); %.1f s",
                    target, base, gain1, gain2, secs);
  return v;
}

// Length of the longest non-decreasing subsequence.
int longest_nondecreasing(const std::vector<double>& x) {
  std::vector<int> len(x.size(), 1);
  int best = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j)
      if (x[j] <= x[i]) len[i] = std::max(len[i], len[j] + 1);
    best = std::max(best, len[i]);
  }
  return best;
}

Verdict criterion_beampattern(const ExperimentConfig& cfg, const Designs& d) {
  const int g3 = 1;
  const double deg = kPi / 180.0;
  int minima_missing = 0, ordered_seeds = 0, designs = 0;
  for (int seed = 1; seed <= kSeeds; ++seed) {
    const auto& r = d.optimal.at({seed, g3});
    if (!r) continue;
    ++designs;
    const Scenario s = cfg.scenario_for(static_cast<std::uint64_t>(seed));
    const int k_count = s.num_locations();
    for (int k = 0; k < k_count; ++k) {
      std::vector<double> grid;
      for (int i = -150; i <= 150; ++i) grid.push_back(s.angles[k] + i * 0.01 * deg);
      const auto pat = beampattern(r->beams, grid, cfg.eval_path_loss_db, s);
      bool found = false;
      for (std::size_t i = 1; i + 1 < pat.size(); ++i) {
        if (std::abs(grid[i] - s.angles[k]) > deg + 1e-12) continue;
        if (pat[i].info_power_dbm <= pat[i - 1].info_power_dbm && pat[i].info_power_dbm <= pat[i + 1].info_power_dbm)
          found = true;
      }
      if (!found) ++minima_missing;
    }
    std::vector<int> order(k_count);
    for (int k = 0; k < k_count; ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return s.probs[a] < s.probs[b]; });
    std::vector<double> total;
    for (int k : order) {
      const auto p = beampattern(r->beams, {s.angles[k]}, cfg.eval_path_loss_db, s).front();
      total.push_back(std::pow(10.0, p.info_power_dbm / 10) + std::pow(10.0, p.an_power_dbm / 10));
    }
    if (longest_nondecreasing(total) >= 3) ++ordered_seeds;
  }
  Verdict v;
  v.pass = designs == kSeeds && minima_missing == 0 && ordered_seeds >= 0.7 * kSeeds;
  v.detail = format("%d designs; %d (seed, location) pairs without a local minimum within 1 deg; "
                    "%d/%d seeds with >= 3 of 4 locations in probability order (>= 70%%)",
                    designs, minima_missing, ordered_seeds, kSeeds);
  return v;
}

Verdict criterion_null_space(const ExperimentConfig& cfg, const Designs& d) {
  double eve = 0.0, user1 = 0.0, user2 = 0.0;
  int checked = 0;
  for (const auto& [key, r1] : d.sub1) {
    if (!r1) continue;
    const Scenario s = cfg.scenario_for(static_cast<std::uint64_t>(key.first));
    for (int k = 0; k < s.num_locations(); ++k) eve = std::max(eve, sinr_eve(r1->beams, k, s));
    for (const auto& v : r1->beams.an_beams) user1 = std::max(user1, std::norm(s.user_channel.dot(v)) / s.power_budget);
    const auto& r2 = d.sub2.at(key);
    if (r2)
      for (const auto& v : r2->beams.an_beams)
        user2 = std::max(user2, std::norm(s.user_channel.dot(v)) / s.power_budget);
    ++checked;
  }
  Verdict v;
  v.pass = checked > 0 && eve <= 1e-12 && user1 <= 1e-12 && user2 <= 1e-12;
  v.detail = format("%d designs; max SINR_E %.2e; max AN at user / P: sub1 %.2e, sub2 %.2e (all <= 1e-12)", checked,
                    eve, user1, user2);
  return v;
}

// Examples with known answers plus a random cross-check against a dual oracle.
Verdict criterion_solver_suite() {
  using namespace isac::sdp;
  auto scalar = [](double x) { return cmat::Constant(1, 1, cdouble(x, 0.0)); };
  int failed = 0;
  auto expect = [&](bool c) {
    if (!c) ++failed;
  };
  auto solved = [&](const SdpProblem& p) {
    const SdpSolution s = solve(p);
    track(s);
    return s;
  };

  {
    SdpProblem p;
    const int x = p.add_block(1);
    p.objective[x] = scalar(1.0);
    p.add_constraint({{{x, scalar(1.0)}}, Relation::le, 1.0});
    const SdpSolution s = solved(p);
    expect(s.status == Status::optimal && std::abs(s.objective - 1.0) < 1e-7);
  }
  {
    SdpProblem p;
    const int x = p.add_block(2);
    cmat c = cmat::Zero(2, 2);
    c(0, 0) = 2.0;
    c(1, 1) = 1.0;
    p.objective[x] = c;
    p.add_constraint({{{x, cmat::Identity(2, 2)}}, Relation::eq, 1.0});
    const SdpSolution s = solved(p);
    cmat e = cmat::Zero(2, 2);
    e(0, 0) = 1.0;
    expect(s.status == Status::optimal && std::abs(s.objective - 2.0) < 1e-7 && (s.blocks[x] - e).norm() < 1e-6);
  }
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  auto random_hermitian = [&](int n) {
    cmat a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = cdouble(g(rng), g(rng));
    return hermitian_part(a);
  };
  auto lambda_max = [](const cmat& c) {
    Eigen::SelfAdjointEigenSolver<cmat> es(c, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(es.eigenvalues().size() - 1);
  };
  for (int t = 0; t < 20; ++t) {
    SdpProblem p;
    const int x = p.add_block(3);
    p.objective[x] = random_hermitian(3);
    p.add_constraint({{{x, cmat::Identity(3, 3)}}, Relation::eq, 1.0});
    const SdpSolution s = solved(p);
    expect(s.status == Status::optimal && std::abs(s.objective - lambda_max(p.objective[x])) < 1e-7);
  }
  {
    SdpProblem p;
    const int x = p.add_block(2);
    p.add_constraint({{{x, cmat::Identity(2, 2)}}, Relation::eq, 1.0});
    expect(check_feasible(p).feasible);
    SdpProblem q;
    const int y = q.add_block(2);
    q.add_constraint({{{y, cmat::Identity(2, 2)}}, Relation::le, -1.0});
    expect(!check_feasible(q).feasible);
    expect(solve(q).status == Status::infeasible);
  }
  // Two equality rows over random blocks; the dual is a convex scalar problem.
  double worst_cross = 0.0;
  std::uniform_int_distribution<int> nblocks(1, 3), dim(1, 4);
  std::uniform_real_distribution<double> u(0.1, 0.9);
  for (int t = 0; t < 50; ++t) {
    SdpProblem p;
    std::vector<cmat> cs, as;
    Constraint unit, second;
    double lo = 1e300, hi = -1e300;
    const int nb = nblocks(rng);
    for (int b = 0; b < nb; ++b) {
      const int n = dim(rng);
      const int idx = p.add_block(n);
      cs.push_back(random_hermitian(n));
      as.push_back(random_hermitian(n));
      p.objective[idx] = cs.back();
      unit.terms.push_back({idx, cmat::Identity(n, n)});
      second.terms.push_back({idx, as.back()});
      lo = std::min(lo, min_eigenvalue(as.back()));
      hi = std::max(hi, lambda_max(as.back()));
    }
    const double dval = lo + u(rng) * (hi - lo);
    unit.rhs = 1.0;
    second.rhs = dval;
    p.add_constraint(unit);
    p.add_constraint(second);
    const SdpSolution s = solved(p);
    auto dual = [&](double y2) {
      double y1 = -1e300;
      for (std::size_t b = 0; b < cs.size(); ++b) y1 = std::max(y1, lambda_max(cs[b] - y2 * as[b]));
      return y1 + dval * y2;
    };
    double a = -1e4, bnd = 1e4;
    for (int pass = 0; pass < 4; ++pass) {
      const auto r = boost::math::tools::brent_find_minima(dual, a, bnd, 52);
      const double w = (bnd - a) / 100;
      a = r.first - w;
      bnd = r.first + w;
    }
    const double oracle = boost::math::tools::brent_find_minima(dual, a, bnd, 52).second;
    if (s.status != Status::optimal) {
      ++failed;
      continue;
    }
    worst_cross = std::max(worst_cross, std::abs(s.objective - oracle) / std::max(1.0, std::abs(oracle)));
  }
  Verdict v;
  v.pass = failed == 0 && worst_cross <= 1e-5 && g_max_residual <= 1e-8;
  v.detail = format("%d example failures; random cross-check max rel error %.2e (<= 1e-5); "
                    "max residual over all optimal exits %.2e (<= 1e-8)",
                    failed, worst_cross, g_max_residual);
  return v;
}

}  // namespace

int main() {
  const auto t0 = clock_type::now();
  const ExperimentConfig cfg = builtin_scenario();

  if (std::getenv("ISAC_ACCEPTANCE_ONLY4")) {
    report(4, "small-instance optimality", criterion_small_instance(cfg));
    return 0;
  }
  report(1, "bound sandwich", criterion_bound_sandwich(cfg));
  report(2, "FIM consistency", criterion_fim_consistency(cfg));
  report(3, "SDR tightness", criterion_sdr_tightness(cfg));
  report(4, "small-instance optimality", criterion_small_instance(cfg));
  const Designs designs = build_designs(cfg);
  report(5, "method ordering", criterion_method_ordering(designs));
  report(6, "gamma-curve shape", criterion_gamma_curve(cfg));
  report(7, "power gain", criterion_power_gain(cfg, designs));
  report(8, "beampattern structure", criterion_beampattern(cfg, designs));
  report(9, "null-space exactness", criterion_null_space(cfg, designs));
  report(10, "solver suite", criterion_solver_suite());

  std::printf("%d of 10 criteria failed; %.1f s\n", g_failures, seconds_since(t0));
  return g_failures == 0 ? 0 : 1;
}
