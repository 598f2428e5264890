// SPDX-License-Identifier: Apache-2.0
//
// Secure beamforming under a PCRB constraint: feasibility, the two-stage
// optimal design (SDR over a fixed eavesdropper-SINR cap gamma, then a search
// over gamma) and the two null-space designs.
//
// The SDPs are posed in normalized units: powers relative to P, the user
// channel as hbar = h sqrt(P) / sigma, and the eavesdropper noise as
// nbar_E = sigma_E^2 r^2 / (beta0 P). A lifted pair (Wbar, Vbar, t) maps back
// to physical covariances W = P Wbar / t, V = P Vbar / t.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "isac/model.hpp"
#include "isac/pcrb.hpp"
#include "isac/sdp.hpp"

namespace isac {

class OptimizerError : public std::runtime_error {
 public:
  enum class Kind { infeasible, an_rank_overflow, empty_null_space, degenerate_input, numerical_failure };

  OptimizerError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::string to_string(OptimizerError::Kind kind);

struct GammaSearchConfig {
  int grid_points = 60;
  double gamma_min = 1e-4;
  double gamma_max = 0.0;  // <= 0 selects P max_k ||a_k||^2 beta0 / (r^2 sigma_E^2)
  double golden_rel_tol = 1e-4;  // bracket width in log(gamma)
  int threads = 1;
};

struct OptimizerOptions {
  GammaSearchConfig search;
  sdp::SolverOptions solver;
  int sub2_grid_points = 512;
  double t_min = 1e-10;
};

struct GammaSample {
  double gamma = 0.0;
  double f = 0.0;          // optimal user SINR under the cap
  double objective = 0.0;  // log2((1 + f) / (1 + gamma))
};

struct OptimizationResult {
  std::string method;
  Beamformer beams;
  CovariancePair covariances;
  double worst_secrecy_rate = 0.0;
  double achieved_pcrb = 0.0;
  std::optional<double> gamma_star;
  std::vector<GammaSample> gamma_curve;
  double objective_at_gamma_star = 0.0;  // g(gamma*) from the SDP value
  double max_solver_residual = 0.0;
  int sdp_solves = 0;
};

struct P1Feasibility {
  bool feasible = false;
  bool vacuous = false;  // xi <= 0: the prior alone meets the threshold
  double margin = 0.0;   // phase-I margin
  cmat witness;          // a feasible transmit covariance when feasible
};

P1Feasibility check_feasibility_p1(const Scenario& scenario, const SensingMatrices& matrices,
                                   double gamma_pcrb, const OptimizerOptions& options = {});

/// Largest value of tr(M2 R) - |tr(M3 R)|^2 / tr(M1 R) over tr(R) <= P, and
/// the PCRB it attains.
struct SensingLimit {
  double information = 0.0;
  double min_pcrb = 0.0;
  cmat covariance;
};
SensingLimit max_sensing_information(const Scenario& scenario, const SensingMatrices& matrices,
                                     const OptimizerOptions& options = {});

/// Data of the lifted inner problem for one gamma, in normalized units.
struct InnerProblem {
  cmat h_bar;  // H P / sigma^2
  std::vector<cmat> a;  // A_k
  cmat m1, m2, m3;
  double nbar_eve = 0.0;
  double xi_bar = 0.0;  // xi / P
  bool pcrb_active = false;
  double gamma = 0.0;
  double t_min = 1e-10;
  double s1 = 1.0, s2 = 1.0;  // congruence scaling of the Schur block
};

InnerProblem make_inner_problem(double gamma, const Scenario& scenario, const SensingMatrices& matrices,
                                double gamma_pcrb, const OptimizerOptions& options = {});

sdp::SdpProblem build_inner_sdp(const InnerProblem& inner);

struct InnerSolution {
  cmat w, v;  // lifted, normalized
  double t = 0.0;
  double f_gamma = 0.0;
  sdp::SdpSolution sdp;
};

InnerSolution solve_inner(double gamma, const Scenario& scenario, const SensingMatrices& matrices,
                          double gamma_pcrb, const OptimizerOptions& options = {});

/// Largest violation of the lifted constraints, each measured relative to the
/// magnitude of the terms it compares.
double inner_violation(const InnerProblem& inner, const cmat& w, const cmat& v, double t);

struct ReducedPair {
  cmat w, v;
};

ReducedPair rank_one_reduce(const cmat& w, const cmat& v, const cvec& h);

Beamformer extract_beams(const cmat& w_tilde, const cmat& v_tilde, int n_an);

OptimizationResult optimize_optimal(const Scenario& scenario, const SensingMatrices& matrices,
                                    double gamma_pcrb, const OptimizerOptions& options = {});

struct GammaCurve {
  std::vector<GammaSample> grid;  // failed grid points carry f = NaN, objective = -inf
  GammaSample best;               // after golden-section refinement
};

/// The gamma search without beam extraction.
GammaCurve gamma_curve(const Scenario& scenario, const SensingMatrices& matrices, double gamma_pcrb,
                       const OptimizerOptions& options = {});

/// Design for a fixed eavesdropper SINR cap gamma (no search).
OptimizationResult optimize_fixed_gamma(double gamma, const Scenario& scenario, const SensingMatrices& matrices,
                                        double gamma_pcrb, const OptimizerOptions& options = {});

OptimizationResult optimize_suboptimal1(const Scenario& scenario, const SensingMatrices& matrices,
                                        double gamma_pcrb, const OptimizerOptions& options = {});

OptimizationResult optimize_suboptimal2(const Scenario& scenario, const SensingMatrices& matrices,
                                        double gamma_pcrb, const OptimizationResult& sub1,
                                        const OptimizerOptions& options = {});

/// Optimal design with the PCRB constraint removed.
OptimizationResult secrecy_upper_bound(const Scenario& scenario, const SensingMatrices& matrices,
                                       const OptimizerOptions& options = {});

}  // namespace isac
