// SPDX-License-Identifier: Apache-2.0

#include "isac/pcrb.hpp"

#include <cmath>
#include <limits>

namespace isac {

namespace {

struct RawMatrices {
  cmat m1, m2, m3, q;
};

RawMatrices integrate_matrices(const Scenario& s, const QuadratureConfig& quad) {
  const int nt = s.n_tx;
  const double rx_energy = derivative_weight_energy(s.n_rx);
  RawMatrices out{cmat::Zero(nt, nt), cmat::Zero(nt, nt), cmat::Zero(nt, nt), cmat::Zero(nt, nt)};
  cmat adot_outer = cmat::Zero(nt, nt);

  const QuadratureRule rule = mixture_rule(s, quad);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double theta = rule.nodes[i];
    const double w = rule.weights[i];
    const cvec a = steering_tx(theta, nt);
    const cvec ad = steering_derivative(theta, nt, ArrayKind::tx);
    const double c = std::cos(theta);
    const cmat aa = a * a.adjoint();
    out.m1.noalias() += w * aa;
    out.q.noalias() += (w * rx_energy * c * c) * aa;
    adot_outer.noalias() += w * ad * ad.adjoint();
    out.m3.noalias() += w * ad * a.adjoint();
  }
  const double nr = s.n_rx;
  out.m1 *= nr;
  out.m3 *= nr;
  out.m2 = out.q + nr * adot_outer;
  out.m1 = hermitian_part(out.m1);
  out.m2 = hermitian_part(out.m2);
  out.q = hermitian_part(out.q);
  return out;
}

double epsilon_with(const Scenario& s, const QuadratureConfig& quad) {
  const std::size_t k_count = s.angles.size();
  if (k_count < 2) return 0.0;
  const double var = s.sigma_theta_sq;
  const double log_norm = -0.5 * std::log(2.0 * kPi * var);

  const QuadratureRule rule = union_rule(s, quad);
  std::vector<double> logf(k_count), ft(k_count);
  double eps = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double theta = rule.nodes[i];
    double lmax = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < k_count; ++k) {
      const double d = theta - s.angles[k];
      logf[k] = s.probs[k] > 0.0 ? std::log(s.probs[k]) + log_norm - d * d / (2.0 * var)
                                 : -std::numeric_limits<double>::infinity();
      lmax = std::max(lmax, logf[k]);
    }
    double denom = 0.0;
    for (std::size_t k = 0; k < k_count; ++k) {
      ft[k] = std::exp(logf[k] - lmax);
      denom += ft[k];
    }
    double num = 0.0;
    for (std::size_t k = 0; k < k_count; ++k)
      for (std::size_t n = k + 1; n < k_count; ++n) {
        const double d = s.angles[n] - s.angles[k];
        num += 2.0 * ft[k] * ft[n] * d * d;
      }
    eps += rule.weights[i] * std::exp(lmax) * num / (2.0 * var * var * denom);
  }
  return eps;
}

void check_converged(const cmat& coarse, const cmat& fine, double rel_tol, const char* name) {
  const double scale = std::max(fine.norm(), 1e-300);
  if ((coarse - fine).norm() > rel_tol * scale)
    throw QuadratureError(std::string("quadrature did not converge for ") + name);
}

}  // namespace

double rho0_value(int n_rx, Rho0Convention convention) {
  double s = 0.0;
  for (int n = 1; n <= n_rx; ++n) {
    if (convention == Rho0Convention::first_element) {
      s += kPi * kPi * (n - 1.0) * (n - 1.0) / 4.0;
    } else {
      const double m = n_rx + 1.0 - 2.0 * n;
      s += kPi * kPi * m * m / 8.0;
    }
  }
  return s;
}

double compute_epsilon(const Scenario& scenario, const QuadratureConfig& quad) {
  const double eps = epsilon_with(scenario, quad);
  QuadratureConfig doubled = quad;
  doubled.nodes_per_component *= 2;
  const double eps_fine = epsilon_with(scenario, doubled);
  if (std::abs(eps - eps_fine) > quad.rel_tol * std::max(std::abs(eps_fine), 1.0 / scenario.sigma_theta_sq))
    throw QuadratureError("quadrature did not converge for epsilon");
  return eps;
}

SensingMatrices compute_sensing_matrices(const Scenario& scenario, const QuadratureConfig& quad,
                                         Rho0Convention convention) {
  const RawMatrices raw = integrate_matrices(scenario, quad);
  QuadratureConfig doubled = quad;
  doubled.nodes_per_component *= 2;
  const RawMatrices fine = integrate_matrices(scenario, doubled);
  check_converged(raw.m1, fine.m1, quad.rel_tol, "M1");
  check_converged(raw.m2, fine.m2, quad.rel_tol, "M2");
  check_converged(raw.m3, fine.m3, quad.rel_tol, "M3");
  check_converged(raw.q, fine.q, quad.rel_tol, "Q");

  SensingMatrices out;
  out.m1 = raw.m1;
  out.m2 = raw.m2;
  out.m3 = raw.m3;
  out.q = raw.q;
  out.rho0 = rho0_value(scenario.n_rx, convention);
  out.q_tilde = cmat::Zero(scenario.n_tx, scenario.n_tx);
  for (std::size_t k = 0; k < scenario.angles.size(); ++k) {
    const cvec a = steering_tx(scenario.angles[k], scenario.n_tx);
    out.q_tilde += (out.rho0 * scenario.probs[k] * (std::cos(2.0 * scenario.angles[k]) + 1.0)) *
                   (a * a.adjoint());
  }
  out.epsilon = compute_epsilon(scenario, quad);
  out.beta_bar_sq = scenario.beta_bar_sq();
  return out;
}

Eigen::Matrix3d fim_blocks(const cmat& covariance, cdouble beta, const Scenario& s,
                           const QuadratureConfig& quad) {
  const int nt = s.n_tx;
  const int nr = s.n_rx;
  double g1 = 0.0, g2 = 0.0;
  cdouble g3 = 0.0;
  const QuadratureRule rule = mixture_rule(s, quad);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double theta = rule.nodes[i];
    const cvec a = steering_tx(theta, nt);
    const cvec ad = steering_derivative(theta, nt, ArrayKind::tx);
    const cvec b = steering_rx(theta, nr);
    const cvec bd = steering_derivative(theta, nr, ArrayKind::rx);
    const cmat m = b * a.adjoint();
    const cmat md = bd * a.adjoint() + b * ad.adjoint();
    const double w = rule.weights[i];
    g1 += w * (m * covariance * m.adjoint()).trace().real();
    g2 += w * (md * covariance * md.adjoint()).trace().real();
    g3 += w * (md.adjoint() * m * covariance).trace();
  }

  const double c = 2.0 / s.noise_radar;
  const cdouble bg = std::conj(beta) * g3;
  Eigen::Matrix3d f = Eigen::Matrix3d::Zero();
  f(0, 0) = c * std::norm(beta) * g2 + 1.0 / s.sigma_theta_sq - compute_epsilon(s, quad);
  f(0, 1) = f(1, 0) = c * bg.real();
  f(0, 2) = f(2, 0) = c * (bg * cdouble(0.0, 1.0)).real();
  f(1, 1) = f(2, 2) = c * g1;
  return f;
}

double sensing_information(const cmat& covariance, const SensingMatrices& m) {
  const double g1 = trace_inner(m.m1, covariance);
  const double g2 = trace_inner(m.m2, covariance);
  const cdouble g3 = trace_product(m.m3, covariance);
  const double r_scale = std::abs(covariance.trace().real());
  if (g1 <= 1e-15 * m.m1.trace().real() * r_scale) return g2;
  return g2 - std::norm(g3) / g1;
}

double pcrb_exact(const cmat& covariance, const SensingMatrices& m, const Scenario& s) {
  const double prior = 1.0 / s.sigma_theta_sq - m.epsilon;
  return 1.0 / (prior + 2.0 * m.beta_bar_sq / s.noise_radar * sensing_information(covariance, m));
}

double pcrb_upper(const cmat& covariance, const SensingMatrices& m, const Scenario& s) {
  const double prior = 1.0 / s.sigma_theta_sq - m.epsilon;
  return 1.0 / (prior + 2.0 * m.beta_bar_sq / s.noise_radar * trace_inner(m.q, covariance));
}

double pcrb_approx(const cmat& covariance, const SensingMatrices& m, const Scenario& s) {
  return 1.0 / (2.0 * m.beta_bar_sq / s.noise_radar * trace_inner(m.q_tilde, covariance) +
                1.0 / s.sigma_theta_sq);
}

double xi_threshold(double gamma_pcrb, const SensingMatrices& m, const Scenario& s) {
  return s.noise_radar / (2.0 * m.beta_bar_sq) * (1.0 / gamma_pcrb - 1.0 / s.sigma_theta_sq + m.epsilon);
}

}  // namespace isac
