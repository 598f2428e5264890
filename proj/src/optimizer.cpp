// SPDX-License-Identifier: Apache-2.0

#include "isac/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "isac/metrics.hpp"
#include "isac/parallel.hpp"
#include "optimizer_detail.hpp"

namespace isac {

std::string to_string(OptimizerError::Kind kind) {
  switch (kind) {
    case OptimizerError::Kind::infeasible: return "infeasible";
    case OptimizerError::Kind::an_rank_overflow: return "an_rank_overflow";
    case OptimizerError::Kind::empty_null_space: return "empty_null_space";
    case OptimizerError::Kind::degenerate_input: return "degenerate_input";
    case OptimizerError::Kind::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

namespace detail {

SchurMaps schur_maps(const cmat& m1, const cmat& m2, const cmat& m3) {
  SchurMaps out;
  out.m1 = hermitian_part(m1);
  out.m2 = hermitian_part(m2);
  out.m3_re = 0.5 * (m3 + m3.adjoint());
  out.m3_im = (m3 - m3.adjoint()) / cdouble(0.0, 2.0);
  return out;
}

std::pair<double, double> schur_scaling(const SensingMatrices& m) {
  return {1.0 / std::sqrt(m.m2.norm()), 1.0 / std::sqrt(m.m1.norm())};
}

void add_schur_block(sdp::SdpProblem& p, int z, const std::vector<SchurTerm>& terms, double s1, double s2,
                     int t_block, double xi) {
  cmat e11 = cmat::Zero(2, 2), e22 = cmat::Zero(2, 2), ere = cmat::Zero(2, 2), eim = cmat::Zero(2, 2);
  e11(0, 0) = 1.0;
  e22(1, 1) = 1.0;
  ere(0, 1) = ere(1, 0) = 0.5;
  eim(0, 1) = cdouble(0.0, 0.5);
  eim(1, 0) = cdouble(0.0, -0.5);

  auto row = [&](const cmat& ez, auto pick, double scale) {
    sdp::Constraint c;
    c.relation = sdp::Relation::eq;
    c.terms.push_back({z, ez});
    for (const auto& t : terms) c.terms.push_back({t.block, -scale * pick(t.maps)});
    return c;
  };
  sdp::Constraint z11 = row(e11, [](const SchurMaps& m) { return m.m2; }, s1 * s1);
  if (t_block >= 0)
    z11.terms.push_back({t_block, cmat::Constant(1, 1, s1 * s1 * xi)});
  else
    z11.rhs = -s1 * s1 * xi;
  p.add_constraint(std::move(z11));
  p.add_constraint(row(e22, [](const SchurMaps& m) { return m.m1; }, s2 * s2));
  p.add_constraint(row(ere, [](const SchurMaps& m) { return m.m3_re; }, s1 * s2));
  p.add_constraint(row(eim, [](const SchurMaps& m) { return m.m3_im; }, s1 * s2));
}

sdp::SdpSolution solve_or_throw(const sdp::SdpProblem& p, const sdp::SolverOptions& options,
                                const char* what) {
  sdp::SdpSolution sol = sdp::solve(p, options);
  if (sol.status == sdp::Status::optimal) return sol;
  if (sol.status == sdp::Status::infeasible)
    throw OptimizerError(OptimizerError::Kind::infeasible, std::string(what) + " is infeasible");
  const sdp::FeasibilityReport rep = sdp::check_feasible(p, options);
  if (rep.status == sdp::Status::optimal && !rep.feasible)
    throw OptimizerError(OptimizerError::Kind::infeasible, std::string(what) + " is infeasible");
  throw OptimizerError(OptimizerError::Kind::numerical_failure,
                       std::string(what) + ": solver ended with status " + sdp::to_string(sol.status));
}

double max_residual(const sdp::SdpSolution& s) {
  return std::max({s.primal_residual, s.dual_residual, s.gap});
}

std::vector<cvec> an_beams_from(const cmat& v, int n_an, double reference) {
  const int n = static_cast<int>(v.rows());
  Eigen::SelfAdjointEigenSolver<cmat> es(hermitian_part(v));
  const rvec& lam = es.eigenvalues();
  const double threshold = 1e-7 * std::max(reference, lam(n - 1));
  int significant = 0;
  for (int i = 0; i < n; ++i) significant += lam(i) > threshold ? 1 : 0;
  if (significant > n_an)
    throw OptimizerError(OptimizerError::Kind::an_rank_overflow,
                         "AN covariance has rank " + std::to_string(significant) + " but only " +
                             std::to_string(n_an) + " AN beams are available");
  std::vector<cvec> beams;
  for (int j = 0; j < n_an; ++j) {
    const int idx = n - 1 - j;
    if (idx >= 0)
      beams.push_back(std::sqrt(std::max(lam(idx), 0.0)) * es.eigenvectors().col(idx));
    else
      beams.push_back(cvec::Zero(n));
  }
  return beams;
}

void finalize(OptimizationResult& r, const Scenario& s, const SensingMatrices& m) {
  r.covariances.info = r.beams.info_covariance();
  r.covariances.an = r.beams.an_covariance();
  r.worst_secrecy_rate = secrecy_rate(r.beams, s).worst;
  r.achieved_pcrb = pcrb_exact(r.covariances.total(), m, s);
}

}  // namespace detail

namespace {

using detail::SchurTerm;

sdp::SdpProblem p1_feasibility_problem(const Scenario& s, const SensingMatrices& m, double xi_bar) {
  sdp::SdpProblem p;
  const int r = p.add_block(s.n_tx);
  const int z = p.add_block(2);
  p.add_constraint({{{r, cmat::Identity(s.n_tx, s.n_tx)}}, sdp::Relation::le, 1.0});
  const auto [s1, s2] = detail::schur_scaling(m);
  detail::add_schur_block(p, z, {{r, detail::schur_maps(m.m1, m.m2, m.m3)}}, s1, s2, -1, xi_bar);
  return p;
}

}  // namespace

P1Feasibility check_feasibility_p1(const Scenario& s, const SensingMatrices& m, double gamma_pcrb,
                                   const OptimizerOptions& options) {
  P1Feasibility out;
  const double xi = xi_threshold(gamma_pcrb, m, s);
  if (xi <= 0.0) {
    out.feasible = true;
    out.vacuous = true;
    out.margin = 1.0;
    out.witness = cmat::Zero(s.n_tx, s.n_tx);
    return out;
  }
  const sdp::FeasibilityReport rep =
      sdp::check_feasible(p1_feasibility_problem(s, m, xi / s.power_budget), options.solver);
  if (rep.status != sdp::Status::optimal)
    throw OptimizerError(OptimizerError::Kind::numerical_failure,
                         "feasibility phase-I ended with status " + sdp::to_string(rep.status));
  out.feasible = rep.feasible;
  out.margin = rep.margin;
  if (rep.feasible) out.witness = s.power_budget * hermitian_part(rep.point[0]);
  return out;
}

SensingLimit max_sensing_information(const Scenario& s, const SensingMatrices& m,
                                     const OptimizerOptions& options) {
  sdp::SdpProblem p;
  const int r = p.add_block(s.n_tx);
  const int z = p.add_block(2);
  const int tau = p.add_block(1);
  p.objective[tau](0, 0) = 1.0;
  p.add_constraint({{{r, cmat::Identity(s.n_tx, s.n_tx)}}, sdp::Relation::le, 1.0});
  const auto [s1, s2] = detail::schur_scaling(m);
  // Z11 = s1^2 tr(M2 R) - tau, so tau / s1^2 is the information per unit power.
  detail::add_schur_block(p, z, {{r, detail::schur_maps(m.m1, m.m2, m.m3)}}, s1, s2, tau, 1.0 / (s1 * s1));
  const sdp::SdpSolution sol = detail::solve_or_throw(p, options.solver, "sensing-information problem");
  SensingLimit out;
  out.covariance = s.power_budget * sol.blocks[r];
  out.information = sensing_information(out.covariance, m);
  out.min_pcrb = pcrb_exact(out.covariance, m, s);
  return out;
}

InnerProblem make_inner_problem(double gamma, const Scenario& s, const SensingMatrices& m, double gamma_pcrb,
                                const OptimizerOptions& options) {
  InnerProblem in;
  const cvec hb = s.user_channel * std::sqrt(s.power_budget / s.noise_user);
  in.h_bar = hb * hb.adjoint();
  for (double theta : s.angles) {
    const cvec a = steering_tx(theta, s.n_tx);
    in.a.push_back(a * a.adjoint());
  }
  in.m1 = m.m1;
  in.m2 = m.m2;
  in.m3 = m.m3;
  in.nbar_eve = s.eve_noise_equivalent() / s.power_budget;
  const double xi = xi_threshold(gamma_pcrb, m, s);
  in.pcrb_active = xi > 0.0;
  in.xi_bar = xi / s.power_budget;
  in.gamma = gamma;
  in.t_min = options.t_min;
  std::tie(in.s1, in.s2) = detail::schur_scaling(m);
  return in;
}

sdp::SdpProblem build_inner_sdp(const InnerProblem& in) {
  const int n = static_cast<int>(in.h_bar.rows());
  sdp::SdpProblem p;
  const int w = p.add_block(n);
  const int v = p.add_block(n);
  const int t = p.add_block(1);
  p.objective[w] = in.h_bar;
  const cmat one = cmat::Constant(1, 1, 1.0);

  // The t block holds t - t_min, so t >= t_min needs no extra row.
  for (const cmat& a : in.a)
    p.add_constraint({{{w, a}, {v, -in.gamma * a}, {t, -in.gamma * in.nbar_eve * one}}, sdp::Relation::le, 0.0});
  p.add_constraint({{{v, in.h_bar}, {t, one}}, sdp::Relation::eq, 1.0});
  p.add_constraint({{{w, cmat::Identity(n, n)}, {v, cmat::Identity(n, n)}, {t, -one}}, sdp::Relation::le, 0.0});
  if (in.pcrb_active) {
    const int z = p.add_block(2);
    const auto maps = detail::schur_maps(in.m1, in.m2, in.m3);
    detail::add_schur_block(p, z, {{w, maps}, {v, maps}}, in.s1, in.s2, t, in.xi_bar);
  }
  for (auto& c : p.constraints)
    for (const auto& term : c.terms)
      if (term.block == t) c.rhs -= term.coeff(0, 0).real() * in.t_min;
  return p;
}

InnerSolution solve_inner(double gamma, const Scenario& s, const SensingMatrices& m, double gamma_pcrb,
                          const OptimizerOptions& options) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  const InnerProblem in = make_inner_problem(gamma, s, m, gamma_pcrb, options);
  InnerSolution out;
  out.sdp = detail::solve_or_throw(build_inner_sdp(in), options.solver, "inner problem");
  out.w = out.sdp.blocks[0];
  out.v = out.sdp.blocks[1];
  out.t = out.sdp.blocks[2](0, 0).real() + in.t_min;
  out.f_gamma = out.sdp.objective;
  return out;
}

double inner_violation(const InnerProblem& in, const cmat& w, const cmat& v, double t) {
  const double n = static_cast<double>(w.rows());
  const double wn = w.norm(), vn = v.norm();
  double worst = 0.0;
  auto note = [&](double violation, double scale) {
    if (violation > 0.0) worst = std::max(worst, violation / std::max(scale, 1e-300));
  };
  for (const cmat& a : in.a) {
    const double lhs = trace_inner(a, w) - in.gamma * (trace_inner(a, v) + in.nbar_eve * t);
    note(lhs, a.norm() * (wn + in.gamma * vn) + in.gamma * in.nbar_eve * t);
  }
  note(std::abs(trace_inner(in.h_bar, v) + t - 1.0), 1.0);
  note(w.trace().real() + v.trace().real() - t, std::sqrt(n) * (wn + vn) + t);
  note(in.t_min - t, 1.0);
  const double psd_scale = wn + vn;
  note(-min_eigenvalue(w), psd_scale);
  note(-min_eigenvalue(v), psd_scale);
  if (in.pcrb_active) {
    const cmat r = w + v;
    Eigen::Matrix2cd z;
    z(0, 0) = in.s1 * in.s1 * (trace_inner(in.m2, r) - in.xi_bar * t);
    z(1, 1) = in.s2 * in.s2 * trace_inner(in.m1, r);
    z(0, 1) = in.s1 * in.s2 * trace_product(in.m3, r);
    z(1, 0) = std::conj(z(0, 1));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(z, Eigen::EigenvaluesOnly);
    const double scale = in.s1 * in.s1 * (std::abs(trace_inner(in.m2, r)) + in.xi_bar * t) +
                         in.s2 * in.s2 * std::abs(trace_inner(in.m1, r));
    note(-es.eigenvalues()(0), scale);
  }
  return worst;
}

ReducedPair rank_one_reduce(const cmat& w, const cmat& v, const cvec& h) {
  const cvec wh = w * h;
  const double d = h.dot(wh).real();
  if (!(d > 1e-12 * std::abs(w.trace().real()) * h.squaredNorm()))
    throw OptimizerError(OptimizerError::Kind::degenerate_input,
                         "information covariance is orthogonal to the user channel");
  ReducedPair out;
  out.w = hermitian_part(wh * wh.adjoint() / d);
  out.v = hermitian_part(v + w - out.w);
  return out;
}

Beamformer extract_beams(const cmat& w_tilde, const cmat& v_tilde, int n_an) {
  Eigen::SelfAdjointEigenSolver<cmat> es(hermitian_part(w_tilde));
  const int n = static_cast<int>(w_tilde.rows());
  const rvec& lam = es.eigenvalues();
  const double l1 = lam(n - 1);
  if (n > 1 && lam(n - 2) > 1e-7 * std::max(l1, 0.0))
    throw OptimizerError(OptimizerError::Kind::degenerate_input, "information covariance is not rank one");
  Beamformer b;
  b.w = std::sqrt(std::max(l1, 0.0)) * es.eigenvectors().col(n - 1);
  b.an_beams = detail::an_beams_from(v_tilde, n_an, std::max(l1, 0.0));
  return b;
}

namespace {

struct Evaluation {
  bool ok = false;
  GammaSample sample;
  InnerSolution solution;
};

double objective_of(double gamma, double f) { return std::log2((1.0 + f) / (1.0 + gamma)); }

constexpr int kMaxDecadesBelowGrid = 8;

struct SearchOutcome {
  std::vector<GammaSample> grid;
  Evaluation best;
  int solves = 0;
  double max_residual = 0.0;
};

SearchOutcome search_gamma(const Scenario& s, const SensingMatrices& m, double gamma_pcrb,
                           const OptimizerOptions& opt) {
  const GammaSearchConfig& cfg = opt.search;
  if (cfg.grid_points < 3) throw std::invalid_argument("gamma grid needs at least 3 points");
  double gmax = cfg.gamma_max;
  if (!(gmax > 0.0)) gmax = s.power_budget * s.n_tx / s.eve_noise_equivalent();
  const double gmin = cfg.gamma_min;
  if (!(gmin > 0.0 && gmax > gmin)) throw std::invalid_argument("invalid gamma search range");

  auto evaluate = [&](double gamma) {
    Evaluation e;
    e.sample.gamma = gamma;
    try {
      e.solution = solve_inner(gamma, s, m, gamma_pcrb, opt);
      e.sample.f = e.solution.f_gamma;
      e.sample.objective = objective_of(gamma, e.sample.f);
      e.ok = true;
    } catch (const OptimizerError& err) {
      if (err.kind() == OptimizerError::Kind::infeasible) throw;
      e.sample.f = std::numeric_limits<double>::quiet_NaN();
      e.sample.objective = -std::numeric_limits<double>::infinity();
    }
    return e;
  };

  SearchOutcome out;
  const int n = cfg.grid_points;
  std::vector<Evaluation> grid(n);
  const double lmin = std::log(gmin), lmax = std::log(gmax);
  std::vector<double> lg(n);
  for (int i = 0; i < n; ++i) lg[i] = lmin + (lmax - lmin) * i / (n - 1);
  parallel_for(static_cast<std::size_t>(n), cfg.threads, [&](std::size_t i) { grid[i] = evaluate(std::exp(lg[i])); });
  out.solves += n;

  int best = -1;
  for (int i = 0; i < n; ++i) {
    out.grid.push_back(grid[i].sample);
    if (!grid[i].ok) continue;
    out.max_residual = std::max(out.max_residual, detail::max_residual(grid[i].solution.sdp));
    if (best < 0 || grid[i].sample.objective > grid[best].sample.objective) best = i;
  }
  if (best < 0) throw OptimizerError(OptimizerError::Kind::numerical_failure, "no gamma grid point could be solved");
  out.best = grid[best];

  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  auto probe = [&](double x) {
    Evaluation e = evaluate(std::exp(x));
    ++out.solves;
    if (e.ok) {
      out.max_residual = std::max(out.max_residual, detail::max_residual(e.solution.sdp));
      if (e.sample.objective > out.best.sample.objective) out.best = e;
    }
    return e.sample.objective;
  };

  // Golden-section refinement in log(gamma) on the bracket around the grid argmax.
  double a = lg[std::max(best - 1, 0)], b = lg[std::min(best + 1, n - 1)];
  if (best == 0) {
    // The optimum may sit below the grid, towards zero leakage: walk down by
    // decades while the objective still improves.
    const double step = std::log(10.0);
    double x = lg[0], fx = grid[0].sample.objective;
    for (int k = 0; k < kMaxDecadesBelowGrid; ++k) {
      const double fl = probe(x - step);
      if (!(fl > fx)) break;
      b = x;
      x -= step;
      fx = fl;
    }
    a = x - step;
  }
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = probe(c), fd = probe(d);
  while (b - a > cfg.golden_rel_tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = probe(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = probe(d);
    }
  }
  return out;
}

void check_p1(const Scenario& s, const SensingMatrices& m, double gamma_pcrb, const OptimizerOptions& opt) {
  if (!check_feasibility_p1(s, m, gamma_pcrb, opt).feasible)
    throw OptimizerError(OptimizerError::Kind::infeasible, "the PCRB threshold cannot be met with the power budget");
}

}  // namespace

GammaCurve gamma_curve(const Scenario& s, const SensingMatrices& m, double gamma_pcrb,
                       const OptimizerOptions& options) {
  s.validate();
  check_p1(s, m, gamma_pcrb, options);
  SearchOutcome so = search_gamma(s, m, gamma_pcrb, options);
  return {std::move(so.grid), so.best.sample};
}

OptimizationResult optimize_fixed_gamma(double gamma, const Scenario& s, const SensingMatrices& m,
                                        double gamma_pcrb, const OptimizerOptions& options) {
  s.validate();
  check_p1(s, m, gamma_pcrb, options);
  const InnerSolution sol = solve_inner(gamma, s, m, gamma_pcrb, options);
  OptimizationResult r;
  r.method = "optimal";
  r.gamma_star = gamma;
  r.objective_at_gamma_star = objective_of(gamma, sol.f_gamma);
  r.gamma_curve = {{gamma, sol.f_gamma, r.objective_at_gamma_star}};
  r.max_solver_residual = detail::max_residual(sol.sdp);
  r.sdp_solves = 1;
  const ReducedPair red = rank_one_reduce(sol.w, sol.v, s.user_channel);
  const double scale = s.power_budget / sol.t;
  r.beams = extract_beams(scale * red.w, scale * red.v, s.n_an);
  detail::finalize(r, s, m);
  return r;
}

OptimizationResult optimize_optimal(const Scenario& s, const SensingMatrices& m, double gamma_pcrb,
                                    const OptimizerOptions& options) {
  s.validate();
  check_p1(s, m, gamma_pcrb, options);
  const SearchOutcome so = search_gamma(s, m, gamma_pcrb, options);

  OptimizationResult r;
  r.method = "optimal";
  r.gamma_curve = so.grid;
  r.gamma_star = so.best.sample.gamma;
  r.objective_at_gamma_star = so.best.sample.objective;
  r.max_solver_residual = so.max_residual;
  r.sdp_solves = so.solves;

  const InnerSolution& best = so.best.solution;
  const ReducedPair red = rank_one_reduce(best.w, best.v, s.user_channel);
  const double scale = s.power_budget / best.t;
  r.beams = extract_beams(scale * red.w, scale * red.v, s.n_an);
  detail::finalize(r, s, m);
  return r;
}

OptimizationResult secrecy_upper_bound(const Scenario& s, const SensingMatrices& m, const OptimizerOptions& options) {
  OptimizationResult r = optimize_optimal(s, m, std::numeric_limits<double>::infinity(), options);
  r.method = "upper_bound";
  return r;
}

}  // namespace isac
