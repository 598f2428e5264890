// SPDX-License-Identifier: Apache-2.0
//
// Equality standard form shared by the solver and the SDPA writer:
//
//   minimize <C, X>  s.t.  <A_i, X> = b_i,  X PSD
//
// with one nonnegative 1x1 slack block appended per inequality, every row
// normalized to unit Frobenius norm and C, b scaled to unit norm.

#pragma once

#include <utility>
#include <vector>

#include "isac/sdp.hpp"

namespace isac::sdp::detail {

using Blocks = std::vector<cmat>;

struct Row {
  std::vector<std::pair<int, cmat>> terms;
};

struct StandardForm {
  int n_orig = 0;
  std::vector<int> dims;
  Blocks c;
  std::vector<Row> rows;
  rvec b;
  std::vector<double> row_scale;
  std::vector<int> constraint_row;  // -1 for dropped empty equalities
  double b_scale = 1.0;
  double c_scale = 1.0;
  bool trivially_infeasible = false;
};

StandardForm to_standard_form(const SdpProblem& problem);

rvec apply_a(const StandardForm& sf, const Blocks& x);
Blocks apply_at(const StandardForm& sf, const rvec& y);
double inner(const Blocks& a, const Blocks& x);
double norm(const Blocks& a);

}  // namespace isac::sdp::detail
