// SPDX-License-Identifier: Apache-2.0
//
// Pieces shared by the optimal and the null-space designs.

#pragma once

#include <vector>

#include "isac/optimizer.hpp"

namespace isac::detail {

/// One linear map R -> tr(M R) restricted to a block, as the coefficient
/// matrices of the Schur entries: rows of [Re, Im] for M3.
struct SchurMaps {
  cmat m1, m2, m3_re, m3_im;
};

SchurMaps schur_maps(const cmat& m1, const cmat& m2, const cmat& m3);

/// Scalars s1, s2 with s1^2 = 1 / ||M2||, s2^2 = 1 / ||M1||.
std::pair<double, double> schur_scaling(const SensingMatrices& m);

/// Adds the four equalities Z = diag(s1, s2) [[tr(M2 R) - c, tr(M3 R)], [., tr(M1 R)]] diag(s1, s2)
/// where R = sum_b X_b over `blocks` (each with its own maps) and c = xi_coeff * X_t
/// when t_block >= 0, otherwise the constant xi_const.
struct SchurTerm {
  int block;
  SchurMaps maps;
};
void add_schur_block(sdp::SdpProblem& p, int z_block, const std::vector<SchurTerm>& terms, double s1,
                     double s2, int t_block, double xi);

/// Solves and, on a non-optimal exit, runs phase-I to tell infeasibility from
/// solver trouble. Throws OptimizerError unless the result is optimal.
sdp::SdpSolution solve_or_throw(const sdp::SdpProblem& p, const sdp::SolverOptions& options,
                                const char* what);

double max_residual(const sdp::SdpSolution& s);

/// Top eigen-directions of a PSD matrix as beams; throws an_rank_overflow if
/// more than n_an eigenvalues exceed 1e-7 * reference.
std::vector<cvec> an_beams_from(const cmat& v, int n_an, double reference);

void finalize(OptimizationResult& r, const Scenario& s, const SensingMatrices& m);

}  // namespace isac::detail
