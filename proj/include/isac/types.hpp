// SPDX-License-Identifier: Apache-2.0
//
// Common numeric types and small linear-algebra helpers.

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace isac {

using cdouble = std::complex<double>;
using cvec = Eigen::VectorXcd;
using cmat = Eigen::MatrixXcd;
using rvec = Eigen::VectorXd;
using rmat = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;

/// Raised when a configuration or physical model violates its invariants.
class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Re tr(A X) for Hermitian A; equals the real Frobenius inner product.
inline double trace_inner(const cmat& a, const cmat& x) {
  return (a.conjugate().cwiseProduct(x)).sum().real();
}

/// tr(A X) for general (non-Hermitian) A and X.
inline cdouble trace_product(const cmat& a, const cmat& x) {
  return (a.transpose().cwiseProduct(x)).sum();
}

inline cmat hermitian_part(const cmat& m) { return 0.5 * (m + m.adjoint()); }

inline double min_eigenvalue(const cmat& m) {
  Eigen::SelfAdjointEigenSolver<cmat> es(hermitian_part(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

/// PSD test with the usual trace-relative slack.
inline bool is_psd(const cmat& m, double rel_tol = 1e-9) {
  const double scale = std::max(std::abs(m.trace().real()), 1e-300);
  return min_eigenvalue(m) >= -rel_tol * scale;
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

}  // namespace isac
