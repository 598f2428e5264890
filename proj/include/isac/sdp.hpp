// SPDX-License-Identifier: Apache-2.0
//
// Small dense semidefinite programs over complex Hermitian blocks:
//
//   maximize   sum_b Re tr(C_b X_b)
//   subject to sum_b Re tr(A_{c,b} X_b)  {=, <=, >=}  rhs_c   for each c
//              X_b Hermitian PSD          (a 1x1 block is a nonnegative scalar)
//
// solved by a primal-dual path-following method with Nesterov-Todd scaling
// and Mehrotra predictor-corrector steps. Inequalities become equalities with
// nonnegative 1x1 slack blocks. Blocks are expected to be small (<= ~16).

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "isac/types.hpp"

namespace isac::sdp {

enum class Relation { eq, le, ge };

enum class Status { optimal, infeasible, unbounded, numerical_failure };

std::string to_string(Status status);

struct Term {
  int block = 0;
  cmat coeff;  // Hermitian, dim x dim of the block
};

struct Constraint {
  std::vector<Term> terms;
  Relation relation = Relation::eq;
  double rhs = 0.0;
};

struct SdpProblem {
  std::vector<int> block_dims;
  std::vector<cmat> objective;  // one Hermitian matrix per block
  std::vector<Constraint> constraints;

  /// Appends a block with a zero objective and returns its index.
  int add_block(int dim);
  void add_constraint(Constraint c) { constraints.push_back(std::move(c)); }
  int num_blocks() const { return static_cast<int>(block_dims.size()); }

  /// Throws std::invalid_argument on inconsistent dimensions or coefficient
  /// matrices that are not Hermitian within 1e-12 (relative).
  void validate() const;
};

struct SolverOptions {
  double tol = 1e-8;
  int max_iterations = 200;
  bool verbose = false;  // per-iteration log on stderr
};

struct SdpSolution {
  Status status = Status::numerical_failure;
  std::vector<cmat> blocks;
  double objective = 0.0;       // primal objective of the maximization
  double dual_objective = 0.0;  // sum_c rhs_c y_c
  std::vector<double> duals;    // one per constraint, maximization convention
  double primal_residual = 0.0;  // relative, on the scaled standard form
  double dual_residual = 0.0;
  double gap = 0.0;
  int iterations = 0;
};

SdpSolution solve(const SdpProblem& problem, const SolverOptions& options = {});

struct FeasibilityReport {
  Status status = Status::numerical_failure;  // status of the phase-I solve
  bool feasible = false;
  double margin = 0.0;  // largest uniform constraint slack (rows normalized), capped at 1
  std::vector<cmat> point;
};

/// Phase-I: maximizes the smallest normalized constraint slack.
FeasibilityReport check_feasible(const SdpProblem& problem, const SolverOptions& options = {});

/// Writes the equality standard form of the problem in SDPA sparse format,
/// with each complex Hermitian block embedded as the real symmetric block
/// [[Re, -Im], [Im, Re]] and slack variables gathered in one diagonal block.
void write_sdpa(const SdpProblem& problem, std::ostream& out);

}  // namespace isac::sdp
