// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>

#include "isac/metrics.hpp"
#include "isac/optimizer.hpp"
#include "optimizer_detail.hpp"

namespace isac {

namespace {

// Orthonormal basis of the null space of the rows of `a`.
cmat null_space(const cmat& a, double rel_threshold) {
  const int n = static_cast<int>(a.cols());
  Eigen::JacobiSVD<cmat> svd(a, Eigen::ComputeFullV);
  const rvec& sv = svd.singularValues();
  int rank = 0;
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) rank += sv(i) > rel_threshold * smax ? 1 : 0;
  return svd.matrixV().rightCols(n - rank);
}

// Sensing information of p_w u u^H + p_an V1 (V1 of unit trace).
struct InfoModel {
  double q1 = 0.0, q2 = 0.0, n1 = 0.0, n2 = 0.0;
  cdouble q3, n3;

  double information(double p_w, double p_an) const {
    const double g1 = p_w * q1 + p_an * n1;
    const double g2 = p_w * q2 + p_an * n2;
    const cdouble g3 = p_w * q3 + p_an * n3;
    if (g1 <= 1e-15 * (p_w + p_an) * std::max(q1, n1)) return g2;
    return g2 - std::norm(g3) / g1;
  }
};

// AN directions used when the first design carries no AN: the candidate
// eavesdropper correlation projected onto the null space of h, truncated to
// its n_an strongest eigen-directions and weighted by their eigenvalues.
std::vector<cvec> fallback_an_directions(const Scenario& s) {
  const int nt = s.n_tx;
  const cvec& h = s.user_channel;
  const cmat proj = cmat::Identity(nt, nt) - h * h.adjoint() / h.squaredNorm();
  cmat corr = cmat::Zero(nt, nt);
  for (double angle : s.angles) {
    const cvec a = proj * steering_tx(angle, nt);
    corr += a * a.adjoint();
  }
  Eigen::SelfAdjointEigenSolver<cmat> es(hermitian_part(corr));
  const rvec& lam = es.eigenvalues();
  std::vector<cvec> out;
  const double floor = 1e-9 * lam.maxCoeff();
  for (Eigen::Index i = lam.size() - 1; i >= 0 && static_cast<int>(out.size()) < s.n_an; --i)
    if (lam(i) > floor) out.push_back(std::sqrt(lam(i)) * es.eigenvectors().col(i));
  return out;
}

}  // namespace

OptimizationResult optimize_suboptimal1(const Scenario& s, const SensingMatrices& m, double gamma_pcrb,
                                        const OptimizerOptions& options) {
  s.validate();
  const int nt = s.n_tx;
  cmat a(s.num_locations(), nt);
  for (int k = 0; k < s.num_locations(); ++k) a.row(k) = steering_tx(s.angles[k], nt).adjoint();
  const cmat j2 = null_space(a, 1e-10);
  if (j2.cols() == 0)
    throw OptimizerError(OptimizerError::Kind::empty_null_space,
                         "candidate eavesdropper channels span the whole transmit space");

  const cvec& h = s.user_channel;
  const cvec g = j2.adjoint() * h;
  if (!(g.norm() > 1e-12 * h.norm()))
    throw OptimizerError(OptimizerError::Kind::degenerate_input, "user channel has no component in the null space");
  const cvec u = j2 * (g / g.norm());
  const cmat x = null_space(h.adjoint(), 1e-10);

  const double xi = xi_threshold(gamma_pcrb, m, s);
  double p_w = s.power_budget;
  cmat v_tilde = cmat::Zero(x.cols(), x.cols());

  OptimizationResult r;
  r.method = "sub1";
  if (xi > 0.0) {
    sdp::SdpProblem p;
    const int pw = p.add_block(1);
    const int vb = p.add_block(static_cast<int>(x.cols()));
    const int z = p.add_block(2);
    p.objective[pw](0, 0) = 1.0;
    p.add_constraint({{{pw, cmat::Constant(1, 1, 1.0)}, {vb, cmat::Identity(x.cols(), x.cols())}},
                      sdp::Relation::le,
                      1.0});
    const cvec ur = u;
    const cmat m3w = ur.adjoint() * m.m3 * ur;
    detail::SchurMaps scalar;
    scalar.m1 = ur.adjoint() * m.m1 * ur;
    scalar.m2 = ur.adjoint() * m.m2 * ur;
    scalar.m3_re = cmat::Constant(1, 1, m3w(0, 0).real());
    scalar.m3_im = cmat::Constant(1, 1, m3w(0, 0).imag());
    scalar.m1 = hermitian_part(scalar.m1);
    scalar.m2 = hermitian_part(scalar.m2);
    const auto an_maps = detail::schur_maps(x.adjoint() * m.m1 * x, x.adjoint() * m.m2 * x, x.adjoint() * m.m3 * x);
    const auto [s1, s2] = detail::schur_scaling(m);
    detail::add_schur_block(p, z, {{pw, scalar}, {vb, an_maps}}, s1, s2, -1, xi / s.power_budget);
    const sdp::SdpSolution sol = detail::solve_or_throw(p, options.solver, "suboptimal-I problem");
    r.max_solver_residual = detail::max_residual(sol);
    r.sdp_solves = 1;
    p_w = s.power_budget * std::clamp(sol.blocks[pw](0, 0).real(), 0.0, 1.0);
    v_tilde = s.power_budget * sol.blocks[vb];
  }

  r.beams.w = std::sqrt(p_w) * u;
  for (const cvec& vt : detail::an_beams_from(v_tilde, s.n_an, p_w + v_tilde.trace().real()))
    r.beams.an_beams.push_back(x * vt);
  detail::finalize(r, s, m);
  return r;
}

OptimizationResult optimize_suboptimal2(const Scenario& s, const SensingMatrices& m, double gamma_pcrb,
                                        const OptimizationResult& sub1, const OptimizerOptions& options) {
  s.validate();
  const int nt = s.n_tx;
  const double power = s.power_budget;
  const cvec& h = s.user_channel;
  const double h2 = h.squaredNorm();
  const cvec u = h / std::sqrt(h2);

  std::vector<cvec> directions = sub1.beams.an_beams;
  double an_total = 0.0;
  for (const cvec& v : directions) an_total += v.squaredNorm();
  if (!(an_total > 1e-12 * power)) {
    directions = fallback_an_directions(s);
    an_total = 0.0;
    for (const cvec& v : directions) an_total += v.squaredNorm();
  }
  const bool has_an = an_total > 0.0;
  cmat v1 = cmat::Zero(nt, nt);  // unit-trace AN covariance
  if (has_an)
    for (const cvec& v : directions) v1 += v * v.adjoint() / an_total;

  InfoModel model;
  model.q1 = u.dot(m.m1 * u).real();
  model.q2 = u.dot(m.m2 * u).real();
  model.q3 = u.dot(m.m3 * u);
  model.n1 = trace_inner(m.m1, v1);
  model.n2 = trace_inner(m.m2, v1);
  model.n3 = trace_product(m.m3, v1);

  const double xi = xi_threshold(gamma_pcrb, m, s);
  const double ne = s.eve_noise_equivalent();
  std::vector<double> leak(s.num_locations()), an_gain(s.num_locations());
  for (int k = 0; k < s.num_locations(); ++k) {
    const cvec a = steering_tx(s.angles[k], nt);
    leak[k] = std::norm(h.dot(a)) / h2;
    an_gain[k] = trace_inner(a * a.adjoint(), v1);
  }

  const double neg_inf = -std::numeric_limits<double>::infinity();
  auto feasible = [&](double pw) { return xi <= 0.0 || model.information(pw, power - pw) >= xi; };
  auto rate = [&](double pw) {
    if (!feasible(pw)) return neg_inf;
    const double user = std::log2(1.0 + pw * h2 / s.noise_user);
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < s.num_locations(); ++k) {
      const double eve = pw * leak[k] / ((power - pw) * an_gain[k] + ne);
      worst = std::min(worst, std::max(0.0, user - std::log2(1.0 + eve)));
    }
    return worst;
  };

  const int ns = options.sub2_grid_points;
  if (ns < 2) throw std::invalid_argument("suboptimal-II grid needs at least 2 points");
  int best = -1;
  double best_rate = neg_inf;
  std::vector<double> grid(ns);
  for (int i = 0; i < ns; ++i) {
    grid[i] = power * i / (ns - 1);
    const double rv = rate(grid[i]);
    if (rv > best_rate) {
      best_rate = rv;
      best = i;
    }
  }
  if (best < 0) throw OptimizerError(OptimizerError::Kind::infeasible, "no information power meets the PCRB threshold");

  double best_pw = grid[best];
  double a = grid[std::max(best - 1, 0)], b = grid[std::min(best + 1, ns - 1)];
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  auto probe = [&](double x) {
    const double rv = rate(x);
    if (rv > best_rate) {
      best_rate = rv;
      best_pw = x;
    }
    return rv;
  };
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = probe(c), fd = probe(d);
  while (b - a > 1e-10 * power) {
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

  OptimizationResult r;
  r.method = "sub2";
  r.beams.w = std::sqrt(best_pw) * u;
  const double an_scale = has_an ? std::sqrt((power - best_pw) / an_total) : 0.0;
  for (const cvec& v : directions) r.beams.an_beams.push_back(an_scale * v);
  detail::finalize(r, s, m);
  return r;
}

}  // namespace isac
