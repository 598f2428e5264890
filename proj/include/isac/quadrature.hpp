// SPDX-License-Identifier: Apache-2.0
//
// Gauss-Legendre rules and the per-component node layout used to integrate
// smooth functions against the Gaussian-mixture angle prior.

#pragma once

#include <functional>
#include <vector>

#include "isac/model.hpp"

namespace isac {

struct QuadratureConfig {
  int nodes_per_component = 64;
  double half_width_sigmas = 8.0;
  double rel_tol = 1e-8;
};

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1].
QuadratureRule gauss_legendre(int n);

/// Nodes and weights such that sum_i w_i f(theta_i) approximates
/// int pbar(theta) f(theta) dtheta: component k contributes p_k times a
/// Gauss-Legendre rule for its own Gaussian over theta_k +- half_width sigma.
QuadratureRule mixture_rule(const Scenario& scenario, const QuadratureConfig& config);

/// Plain Gauss-Legendre rule (weights without the density) over the union of
/// the component intervals; each merged interval is split into panels no wider
/// than one component interval.
QuadratureRule union_rule(const Scenario& scenario, const QuadratureConfig& config);

}  // namespace isac
