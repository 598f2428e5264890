// SPDX-License-Identifier: Apache-2.0

#include <iomanip>
#include <ostream>

#include "isac/sdp.hpp"
#include "sdp_detail.hpp"

namespace isac::sdp {

namespace {

struct Layout {
  std::vector<int> sdpa_block;  // SDPA block number (1-based) per standard-form block
  std::vector<int> offset;      // diagonal position inside the slack block
  int slack_count = 0;
};

// Hermitian H of size n enters as (1/2) [[Re H, -Im H], [Im H, Re H]] so that
// the SDPA inner product reproduces Re tr(H X).
void write_block(std::ostream& out, int matno, int blk, const cmat& h) {
  const Eigen::Index n = h.rows();
  auto put = [&](Eigen::Index i, Eigen::Index j, double v) {
    if (v != 0.0) out << matno << ' ' << blk << ' ' << i + 1 << ' ' << j + 1 << ' ' << v << '\n';
  };
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      put(i, j, 0.5 * h(i, j).real());
      put(n + i, n + j, 0.5 * h(i, j).real());
    }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) put(i, n + j, -0.5 * h(i, j).imag());
}

}  // namespace

void write_sdpa(const SdpProblem& problem, std::ostream& out) {
  problem.validate();
  const detail::StandardForm sf = detail::to_standard_form(problem);

  Layout lay;
  int next = 1;
  for (int b = 0; b < sf.n_orig; ++b) lay.sdpa_block.push_back(next++);
  const int slack_blk = next;
  for (std::size_t b = sf.n_orig; b < sf.dims.size(); ++b) {
    lay.sdpa_block.push_back(slack_blk);
    lay.offset.push_back(lay.slack_count++);
  }

  out << std::setprecision(17);
  out << "\"complex Hermitian SDP in equality standard form (rows and data scaled)\n";
  out << sf.rows.size() << '\n';
  out << sf.n_orig + (lay.slack_count > 0 ? 1 : 0) << '\n';
  for (int b = 0; b < sf.n_orig; ++b) out << 2 * sf.dims[b] << ' ';
  if (lay.slack_count > 0) out << -lay.slack_count;
  out << '\n';
  for (Eigen::Index i = 0; i < sf.b.size(); ++i) out << sf.b(i) << (i + 1 < sf.b.size() ? ' ' : '\n');
  if (sf.b.size() == 0) out << '\n';

  // F0 = C of the maximization; the solver stores the minimization form.
  auto emit = [&](int matno, int b, const cmat& m, double sign) {
    if (b < sf.n_orig) {
      write_block(out, matno, lay.sdpa_block[b], sign * m);
    } else {
      const int pos = lay.offset[b - sf.n_orig] + 1;
      const double v = sign * m(0, 0).real();
      if (v != 0.0) out << matno << ' ' << slack_blk << ' ' << pos << ' ' << pos << ' ' << v << '\n';
    }
  };
  for (std::size_t b = 0; b < sf.dims.size(); ++b) emit(0, static_cast<int>(b), sf.c[b], -1.0);
  for (std::size_t i = 0; i < sf.rows.size(); ++i)
    for (const auto& [b, m] : sf.rows[i].terms) emit(static_cast<int>(i) + 1, b, m, 1.0);
}

}  // namespace isac::sdp
