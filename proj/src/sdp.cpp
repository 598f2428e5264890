// SPDX-License-Identifier: Apache-2.0

#include "isac/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "sdp_detail.hpp"

namespace isac::sdp {

std::string to_string(Status status) {
  switch (status) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    case Status::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

int SdpProblem::add_block(int dim) {
  if (dim < 1) throw std::invalid_argument("SDP block dimension must be positive");
  block_dims.push_back(dim);
  objective.push_back(cmat::Zero(dim, dim));
  return static_cast<int>(block_dims.size()) - 1;
}

namespace {

void check_hermitian(const cmat& m, int dim, const char* what) {
  if (m.rows() != dim || m.cols() != dim)
    throw std::invalid_argument(std::string(what) + ": coefficient dimension does not match its block");
  if (!m.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite coefficient");
  const double scale = std::max(m.norm(), 1.0);
  if ((m - m.adjoint()).norm() > 1e-12 * scale)
    throw std::invalid_argument(std::string(what) + ": coefficient is not Hermitian");
}

}  // namespace

void SdpProblem::validate() const {
  if (objective.size() != block_dims.size())
    throw std::invalid_argument("SDP objective must have one matrix per block");
  for (std::size_t b = 0; b < block_dims.size(); ++b) {
    if (block_dims[b] < 1) throw std::invalid_argument("SDP block dimension must be positive");
    check_hermitian(objective[b], block_dims[b], "objective");
  }
  for (const auto& c : constraints) {
    if (!std::isfinite(c.rhs)) throw std::invalid_argument("constraint: non-finite right-hand side");
    for (const auto& t : c.terms) {
      if (t.block < 0 || t.block >= num_blocks())
        throw std::invalid_argument("constraint: block index out of range");
      check_hermitian(t.coeff, block_dims[t.block], "constraint");
    }
  }
}

namespace detail {

StandardForm to_standard_form(const SdpProblem& p) {
  StandardForm sf;
  sf.n_orig = p.num_blocks();
  sf.dims = p.block_dims;
  for (const auto& c : p.objective) sf.c.push_back(-hermitian_part(c));
  sf.constraint_row.assign(p.constraints.size(), -1);

  std::vector<double> rhs;
  for (std::size_t ci = 0; ci < p.constraints.size(); ++ci) {
    const Constraint& con = p.constraints[ci];
    Row row;
    for (const auto& t : con.terms) {
      auto it = std::find_if(row.terms.begin(), row.terms.end(),
                             [&](const auto& e) { return e.first == t.block; });
      if (it == row.terms.end())
        row.terms.emplace_back(t.block, hermitian_part(t.coeff));
      else
        it->second += hermitian_part(t.coeff);
    }
    double norm_sq = 0.0;
    for (const auto& [b, m] : row.terms) norm_sq += m.squaredNorm();

    if (con.relation == Relation::eq && norm_sq == 0.0) {
      if (con.rhs != 0.0) sf.trivially_infeasible = true;
      continue;
    }
    if (con.relation != Relation::eq) {
      const int slack = static_cast<int>(sf.dims.size());
      sf.dims.push_back(1);
      sf.c.push_back(cmat::Zero(1, 1));
      row.terms.emplace_back(slack, cmat::Constant(1, 1, con.relation == Relation::le ? 1.0 : -1.0));
      norm_sq += 1.0;
    }
    const double r = std::sqrt(norm_sq);
    for (auto& [b, m] : row.terms) m /= r;
    sf.row_scale.push_back(r);
    rhs.push_back(con.rhs / r);
    sf.constraint_row[ci] = static_cast<int>(sf.rows.size());
    sf.rows.push_back(std::move(row));
  }
  sf.b = Eigen::Map<rvec>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));

  const double bn = sf.b.norm();
  sf.b_scale = bn > 0.0 ? bn : 1.0;
  sf.b /= sf.b_scale;
  double cn_sq = 0.0;
  for (const auto& c : sf.c) cn_sq += c.squaredNorm();
  sf.c_scale = cn_sq > 0.0 ? std::sqrt(cn_sq) : 1.0;
  for (auto& c : sf.c) c /= sf.c_scale;
  return sf;
}

rvec apply_a(const StandardForm& sf, const Blocks& x) {
  rvec out(static_cast<Eigen::Index>(sf.rows.size()));
  for (std::size_t i = 0; i < sf.rows.size(); ++i) {
    double s = 0.0;
    for (const auto& [b, m] : sf.rows[i].terms) s += trace_inner(m, x[b]);
    out(static_cast<Eigen::Index>(i)) = s;
  }
  return out;
}

Blocks apply_at(const StandardForm& sf, const rvec& y) {
  Blocks out;
  for (int d : sf.dims) out.push_back(cmat::Zero(d, d));
  for (std::size_t i = 0; i < sf.rows.size(); ++i)
    for (const auto& [b, m] : sf.rows[i].terms) out[b] += y(static_cast<Eigen::Index>(i)) * m;
  return out;
}

double inner(const Blocks& a, const Blocks& x) {
  double s = 0.0;
  for (std::size_t b = 0; b < a.size(); ++b) s += trace_inner(a[b], x[b]);
  return s;
}

double norm(const Blocks& a) {
  double s = 0.0;
  for (const auto& m : a) s += m.squaredNorm();
  return std::sqrt(s);
}

}  // namespace detail

namespace {

using detail::Blocks;
using detail::StandardForm;

// Nesterov-Todd scaling of one block: W = G G^H with G^{-1} X G^{-H} =
// G^H S G = diag(lambda).
struct Scaling {
  cmat g;
  cmat w;
  rvec lambda;
};

bool nt_scaling(const cmat& x, const cmat& s, Scaling& out) {
  Eigen::LLT<cmat> lx(x), ls(s);
  if (lx.info() != Eigen::Success || ls.info() != Eigen::Success) return false;
  const cmat l = lx.matrixL();
  const cmat r = ls.matrixL();
  Eigen::JacobiSVD<cmat> svd(r.adjoint() * l, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const rvec d = svd.singularValues();
  if (d.minCoeff() <= 0.0 || !d.allFinite()) return false;
  out.lambda = d;
  out.g = l * svd.matrixV() * d.cwiseSqrt().cwiseInverse().asDiagonal();
  out.w = hermitian_part(out.g * out.g.adjoint());
  return true;
}

// Largest step alpha with diag(lambda) + alpha * d PSD (infinity if unbounded).
double max_step(const rvec& lambda, const cmat& d) {
  const rvec inv_sqrt = lambda.cwiseSqrt().cwiseInverse();
  const cmat t = inv_sqrt.asDiagonal() * hermitian_part(d) * inv_sqrt.asDiagonal();
  double lmin;
  if (t.rows() == 1) {
    lmin = t(0, 0).real();
  } else {
    Eigen::SelfAdjointEigenSolver<cmat> es(t, Eigen::EigenvaluesOnly);
    lmin = es.eigenvalues()(0);
  }
  return lmin < 0.0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
}

struct Direction {
  Blocks dx, ds;        // unscaled
  Blocks dxt, dst;      // NT-scaled
  rvec dy;
};

class InteriorPoint {
 public:
  InteriorPoint(const StandardForm& sf, const SolverOptions& opt) : sf_(sf), opt_(opt) {}

  SdpSolution run();

  const Blocks& x() const { return x_; }
  const rvec& y() const { return y_; }

 private:
  void initial_point();
  bool compute_scalings();
  bool factor_schur();
  Direction direction(const Blocks& rd, const rvec& rp, const Blocks& k) const;
  void step_lengths(const Direction& d, double& ap, double& ad) const;

  const StandardForm& sf_;
  SolverOptions opt_;
  Blocks x_, s_;
  rvec y_;
  std::vector<Scaling> sc_;
  using lmat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  using lvec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
  Eigen::LDLT<lmat> schur_;
  rvec schur_eq_;  // diagonal equilibration of the Schur matrix
  std::vector<std::vector<std::pair<int, cmat>>> scaled_rows_;

  rvec scaled_a(const Blocks& xt) const;

  rvec schur_solve(const rvec& rhs) const {
    const lvec r = schur_eq_.cwiseProduct(rhs).cast<long double>();
    return schur_eq_.cwiseProduct(rvec(schur_.solve(r).template cast<double>()));
  }
  int n_total_ = 0;
};

void InteriorPoint::initial_point() {
  const std::size_t m = sf_.rows.size();
  x_.clear();
  s_.clear();
  y_ = rvec::Zero(static_cast<Eigen::Index>(m));
  for (std::size_t b = 0; b < sf_.dims.size(); ++b) {
    const int n = sf_.dims[b];
    const double sqn = std::sqrt(static_cast<double>(n));
    double xi = std::max(10.0, sqn);
    double eta = std::max({10.0, sqn, sf_.c[b].norm()});
    for (std::size_t i = 0; i < m; ++i)
      for (const auto& [blk, a] : sf_.rows[i].terms)
        if (blk == static_cast<int>(b)) {
          const double an = a.norm();
          xi = std::max(xi, n * (1.0 + std::abs(sf_.b(static_cast<Eigen::Index>(i)))) / (1.0 + an));
          eta = std::max(eta, an);
        }
    x_.push_back(xi * cmat::Identity(n, n));
    s_.push_back(eta * cmat::Identity(n, n));
    n_total_ += n;
  }
}

bool InteriorPoint::compute_scalings() {
  sc_.resize(x_.size());
  for (std::size_t b = 0; b < x_.size(); ++b)
    if (!nt_scaling(x_[b], s_[b], sc_[b])) return false;
  return true;
}

bool InteriorPoint::factor_schur() {
  // Rows in the scaled space: G^H A_i G. Working with these instead of
  // W A_i W keeps directions with tiny scaling eigenvalues intact.
  const std::size_t m = sf_.rows.size();
  scaled_rows_.assign(m, {});
  for (std::size_t i = 0; i < m; ++i)
    for (const auto& [b, a] : sf_.rows[i].terms)
      scaled_rows_[i].emplace_back(b, hermitian_part(sc_[b].g.adjoint() * a * sc_[b].g));

  rmat mm = rmat::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) {
      double v = 0.0;
      for (const auto& [bi, ai] : scaled_rows_[i])
        for (const auto& [bj, aj] : scaled_rows_[j])
          if (bi == bj) v += trace_inner(ai, aj);
      mm(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      mm(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    }
  schur_eq_.resize(mm.rows());
  for (Eigen::Index i = 0; i < mm.rows(); ++i)
    schur_eq_(i) = mm(i, i) > 0.0 ? 1.0 / std::sqrt(mm(i, i)) : 1.0;
  schur_.compute((schur_eq_.asDiagonal() * mm * schur_eq_.asDiagonal()).cast<long double>());
  return schur_.info() == Eigen::Success;
}

rvec InteriorPoint::scaled_a(const Blocks& xt) const {
  rvec out(static_cast<Eigen::Index>(scaled_rows_.size()));
  for (std::size_t i = 0; i < scaled_rows_.size(); ++i) {
    double s = 0.0;
    for (const auto& [b, m] : scaled_rows_[i]) s += trace_inner(m, xt[b]);
    out(static_cast<Eigen::Index>(i)) = s;
  }
  return out;
}

Direction InteriorPoint::direction(const Blocks& rd, const rvec& rp, const Blocks& k) const {
  const std::size_t nb = x_.size();
  Blocks rdt(nb);
  for (std::size_t b = 0; b < nb; ++b) rdt[b] = hermitian_part(sc_[b].g.adjoint() * rd[b] * sc_[b].g);
  Direction d;
  d.ds.resize(nb);
  d.dx.resize(nb);
  d.dst.resize(nb);
  d.dxt.resize(nb);
  auto assemble = [&] {
    for (std::size_t b = 0; b < nb; ++b) d.dst[b] = rdt[b];
    for (std::size_t i = 0; i < scaled_rows_.size(); ++i)
      for (const auto& [b, m] : scaled_rows_[i]) d.dst[b] -= d.dy(static_cast<Eigen::Index>(i)) * m;
    for (std::size_t b = 0; b < nb; ++b) d.dxt[b] = k[b] - d.dst[b];
  };
  const rvec rhs = rp - scaled_a(k) + scaled_a(rdt);
  d.dy = schur_solve(rhs);
  assemble();
  // One round of iterative refinement on A(dX) = rp.
  for (int pass = 0; pass < 2; ++pass) {
    const rvec res = rp - scaled_a(d.dxt);
    if (res.norm() <= 1e-15 * (1.0 + rp.norm())) break;
    const rvec saved = d.dy;
    const double rn = res.norm();
    d.dy -= schur_solve(res);
    assemble();
    if ((rp - scaled_a(d.dxt)).norm() >= rn) {
      d.dy = saved;
      assemble();
      break;
    }
  }
  const Blocks aty = detail::apply_at(sf_, d.dy);
  for (std::size_t b = 0; b < nb; ++b) {
    d.ds[b] = hermitian_part(rd[b] - aty[b]);
    d.dx[b] = hermitian_part(sc_[b].g * d.dxt[b] * sc_[b].g.adjoint());
  }
  return d;
}

void InteriorPoint::step_lengths(const Direction& d, double& ap, double& ad) const {
  ap = std::numeric_limits<double>::infinity();
  ad = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < x_.size(); ++b) {
    ap = std::min(ap, max_step(sc_[b].lambda, d.dxt[b]));
    ad = std::min(ad, max_step(sc_[b].lambda, d.dst[b]));
  }
}

// Solution of  L K + K L = 2 R  for diagonal L.
cmat lyapunov(const rvec& lambda, const cmat& r) {
  cmat k(r.rows(), r.cols());
  for (Eigen::Index i = 0; i < r.rows(); ++i)
    for (Eigen::Index j = 0; j < r.cols(); ++j) k(i, j) = 2.0 * r(i, j) / (lambda(i) + lambda(j));
  return k;
}

SdpSolution InteriorPoint::run() {
  SdpSolution sol;
  initial_point();
  const std::size_t nb = x_.size();
  const double tol = opt_.tol;
  int stalled = 0;

  auto finish = [&](Status st, int iter) {
    sol.status = st;
    sol.iterations = iter;
    return sol;
  };

  for (int iter = 0; iter <= opt_.max_iterations; ++iter) {
    const rvec rp = sf_.b - detail::apply_a(sf_, x_);
    const Blocks aty = detail::apply_at(sf_, y_);
    Blocks rd(nb);
    for (std::size_t b = 0; b < nb; ++b) rd[b] = sf_.c[b] - aty[b] - s_[b];
    const double pobj = detail::inner(sf_.c, x_);
    const double dobj = sf_.b.dot(y_);
    sol.primal_residual = rp.norm() / (1.0 + sf_.b.norm());
    sol.dual_residual = detail::norm(rd) / (1.0 + detail::norm(sf_.c));
    // Scaled-form gap, and the gap relative to 1 + |objective| in user units.
    const double unit = sf_.b_scale * sf_.c_scale;
    sol.gap = std::max(std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj)),
                       std::abs(pobj - dobj) / (1.0 / unit + std::abs(pobj)));
    const double complementarity = detail::inner(x_, s_) / (1.0 + std::abs(pobj) + std::abs(dobj));

    if (opt_.verbose)
      std::fprintf(stderr, "%3d  pobj %+.10e  dobj %+.10e  pres %.2e  dres %.2e  gap %.2e  xs %.2e\n", iter, pobj, dobj,
                   sol.primal_residual, sol.dual_residual, sol.gap, complementarity);
    if (sol.primal_residual <= tol && sol.dual_residual <= tol && sol.gap <= tol &&
        complementarity <= tol)
      return finish(Status::optimal, iter);

    // Divergence certificates: a dual ray (b^T y -> +inf with A^T y + S -> C
    // bounded) proves primal infeasibility; a primal ray proves unboundedness.
    if (dobj > 0.0) {
      Blocks ray(nb);
      for (std::size_t b = 0; b < nb; ++b) ray[b] = aty[b] + s_[b];
      if (detail::norm(ray) / dobj < tol) return finish(Status::infeasible, iter);
    }
    if (pobj < 0.0) {
      if (detail::apply_a(sf_, x_).norm() / -pobj < tol) return finish(Status::unbounded, iter);
    }
    if (iter == opt_.max_iterations) break;

    if (!compute_scalings() || !factor_schur()) {
      if (opt_.verbose) std::fprintf(stderr, "scaling or Schur factorization failed\n");
      return finish(Status::numerical_failure, iter);
    }

    double mu = 0.0;
    for (const auto& s : sc_) mu += s.lambda.squaredNorm();
    mu /= n_total_;

    // A dual residual far below tolerance is rounding noise; W R_d W would
    // amplify it by the spread of the scaling, so it is left out.
    if (sol.dual_residual < 1e-3 * tol)
      for (auto& r : rd) r.setZero();

    // Predictor.
    Blocks k(nb);
    for (std::size_t b = 0; b < nb; ++b) k[b] = cmat((-sc_[b].lambda).cast<cdouble>().asDiagonal());
    const Direction aff = direction(rd, rp, k);
    double ap, ad;
    step_lengths(aff, ap, ad);
    ap = std::min(1.0, ap);
    ad = std::min(1.0, ad);
    double mu_aff = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
      const cmat xt = cmat(sc_[b].lambda.cast<cdouble>().asDiagonal()) + ap * aff.dxt[b];
      const cmat st = cmat(sc_[b].lambda.cast<cdouble>().asDiagonal()) + ad * aff.dst[b];
      mu_aff += trace_inner(xt, st);
    }
    mu_aff /= n_total_;
    const double expon = std::max(1.0, 3.0 * std::min(ap, ad) * std::min(ap, ad));
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, expon), 0.0, 1.0);

    // Corrector.
    for (std::size_t b = 0; b < nb; ++b) {
      const rvec& lam = sc_[b].lambda;
      const cmat cross = aff.dxt[b] * aff.dst[b];
      cmat rc = -0.5 * (cross + cross.adjoint());
      for (Eigen::Index i = 0; i < lam.size(); ++i) rc(i, i) += sigma * mu - lam(i) * lam(i);
      k[b] = lyapunov(lam, rc);
    }
    const Direction dir = direction(rd, rp, k);
    step_lengths(dir, ap, ad);
    const double frac = 0.98;
    ap = std::min(1.0, frac * ap);
    ad = std::min(1.0, frac * ad);
    if (!std::isfinite(ap) || !std::isfinite(ad)) return finish(Status::numerical_failure, iter);

    for (std::size_t b = 0; b < nb; ++b) {
      x_[b] = hermitian_part(x_[b] + ap * dir.dx[b]);
      s_[b] = hermitian_part(s_[b] + ad * dir.ds[b]);
    }
    y_ += ad * dir.dy;

    if (opt_.verbose) std::fprintf(stderr, "     sigma %.2e  ap %.3e  ad %.3e\n", sigma, ap, ad);
    stalled = (std::max(ap, ad) < 1e-10) ? stalled + 1 : 0;
    if (stalled >= 3) return finish(Status::numerical_failure, iter);
  }
  return finish(Status::numerical_failure, opt_.max_iterations);
}

}  // namespace

SdpSolution solve(const SdpProblem& problem, const SolverOptions& options) {
  problem.validate();
  if (!(options.tol >= 1e-12 && options.tol <= 1e-4))
    throw std::invalid_argument("SDP tolerance must lie in [1e-12, 1e-4]");
  const StandardForm sf = detail::to_standard_form(problem);

  SdpSolution sol;
  if (sf.trivially_infeasible) {
    sol.status = Status::infeasible;
    return sol;
  }
  InteriorPoint ip(sf, options);
  sol = ip.run();

  const double xs = sf.b_scale;
  const double cs = sf.c_scale;
  for (int b = 0; b < sf.n_orig; ++b) sol.blocks.push_back(hermitian_part(xs * ip.x()[b]));
  sol.objective = -xs * cs * detail::inner(sf.c, ip.x());
  sol.dual_objective = -xs * cs * sf.b.dot(ip.y());
  sol.duals.assign(problem.constraints.size(), 0.0);
  for (std::size_t c = 0; c < problem.constraints.size(); ++c) {
    const int r = sf.constraint_row[c];
    if (r >= 0) sol.duals[c] = -ip.y()(r) * cs / sf.row_scale[r];
  }
  return sol;
}

FeasibilityReport check_feasible(const SdpProblem& problem, const SolverOptions& options) {
  problem.validate();
  SdpProblem phase1;
  phase1.block_dims = problem.block_dims;
  for (int d : problem.block_dims) phase1.objective.push_back(cmat::Zero(d, d));
  const int u = phase1.add_block(1);
  phase1.objective[u](0, 0) = -1.0;

  // Margin available from constraints that do not involve any variable.
  double cap = 1.0;
  for (const auto& con : problem.constraints) {
    double norm_sq = 0.0;
    for (const auto& t : con.terms) norm_sq += t.coeff.squaredNorm();
    if (norm_sq == 0.0) {
      const double slack = con.relation == Relation::eq   ? -std::abs(con.rhs)
                           : con.relation == Relation::le ? con.rhs
                                                          : -con.rhs;
      cap = std::min(cap, slack);
      continue;
    }
    const double r = std::sqrt(norm_sq);
    auto add = [&](double sign) {
      Constraint c;
      for (const auto& t : con.terms) c.terms.push_back({t.block, (sign / r) * t.coeff});
      c.terms.push_back({u, cmat::Constant(1, 1, -1.0)});
      c.relation = Relation::le;
      c.rhs = sign * con.rhs / r - 1.0;
      phase1.add_constraint(std::move(c));
    };
    if (con.relation != Relation::ge) add(1.0);
    if (con.relation != Relation::le) add(-1.0);
  }

  FeasibilityReport rep;
  if (phase1.constraints.empty()) {
    rep.status = Status::optimal;
    rep.margin = cap;
    rep.feasible = cap >= -10.0 * options.tol;
    for (int d : problem.block_dims) rep.point.push_back(cmat::Zero(d, d));
    return rep;
  }
  const SdpSolution sol = solve(phase1, options);
  rep.status = sol.status;
  if (sol.status != Status::optimal) {
    rep.feasible = false;
    return rep;
  }
  rep.margin = std::min(cap, 1.0 - sol.blocks[u](0, 0).real());
  rep.feasible = rep.margin >= -10.0 * options.tol;
  rep.point.assign(sol.blocks.begin(), sol.blocks.begin() + problem.num_blocks());
  return rep;
}

}  // namespace isac::sdp
