// SPDX-License-Identifier: Apache-2.0
//
// Posterior Cramer-Rao bound for the target angle under the Gaussian-mixture
// prior: the quadrature matrices, the exact bound, its upper bound and the
// closed-form approximation of the upper bound.

#pragma once

#include "isac/model.hpp"
#include "isac/quadrature.hpp"

namespace isac {

/// Receive-array constant used by the closed-form kernel Q~.
///  - first_element: sum_n pi^2 (n-1)^2 / 4, as printed for the closed form.
///  - symmetric: sum_n pi^2 (N_r+1-2n)^2 / 8, the value obtained by expanding
///    the symmetric-array kernel Q around each theta_k, so that
///    Q~ = lim_{sigma->0} Q.
enum class Rho0Convention { first_element, symmetric };

double rho0_value(int n_rx, Rho0Convention convention);

struct SensingMatrices {
  cmat m1;       // N_r int pbar a a^H
  cmat m2;       // int pbar (||b'||^2 a a^H + N_r a' a'^H)
  cmat m3;       // N_r int pbar a' a^H (not Hermitian)
  cmat q;        // int pbar ||b'||^2 a a^H
  cmat q_tilde;  // rho0 sum_k p_k (cos 2 theta_k + 1) a_k a_k^H
  double epsilon = 0.0;
  double rho0 = 0.0;
  double beta_bar_sq = 0.0;
};

SensingMatrices compute_sensing_matrices(const Scenario& scenario,
                                         const QuadratureConfig& quad = {},
                                         Rho0Convention convention = Rho0Convention::symmetric);

/// Prior-information correction: 1/sigma^2 - epsilon is the prior Fisher
/// information of the mixture.
double compute_epsilon(const Scenario& scenario, const QuadratureConfig& quad = {});

/// Full 3x3 Fisher information for (theta, Re beta, Im beta), integrating the
/// explicit echo response b(theta) a(theta)^H over the prior.
Eigen::Matrix3d fim_blocks(const cmat& covariance, cdouble beta, const Scenario& scenario,
                           const QuadratureConfig& quad = {});

/// tr(M2 R) - |tr(M3 R)|^2 / tr(M1 R), with the fraction taken as 0 when
/// tr(M1 R) vanishes.
double sensing_information(const cmat& covariance, const SensingMatrices& matrices);

double pcrb_exact(const cmat& covariance, const SensingMatrices& matrices, const Scenario& scenario);
double pcrb_upper(const cmat& covariance, const SensingMatrices& matrices, const Scenario& scenario);
double pcrb_approx(const cmat& covariance, const SensingMatrices& matrices, const Scenario& scenario);

inline double pcrb_exact(const Beamformer& beams, const SensingMatrices& m, const Scenario& s) {
  return pcrb_exact(beams.covariance(), m, s);
}
inline double pcrb_approx(const Beamformer& beams, const SensingMatrices& m, const Scenario& s) {
  return pcrb_approx(beams.covariance(), m, s);
}

/// Minimum sensing information required to meet a PCRB threshold; a value
/// <= 0 means the prior alone already satisfies it.
double xi_threshold(double gamma_pcrb, const SensingMatrices& matrices, const Scenario& scenario);

}  // namespace isac
