// SPDX-License-Identifier: Apache-2.0

#include "isac/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace isac {

namespace {

// (P_n(x), P_n'(x)) by the three-term recurrence; valid for |x| < 1.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw QuadratureError("Gauss-Legendre rule needs at least one node");

  static std::mutex cache_mutex;
  static std::map<int, QuadratureRule> cache;
  {
    std::lock_guard lock(cache_mutex);
    if (auto it = cache.find(n); it != cache.end()) return it->second;
  }

  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  // Newton iteration from the classical cosine guess; roots are symmetric so
  // only the upper half is computed.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(n, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }

  std::lock_guard lock(cache_mutex);
  cache.emplace(n, rule);
  return rule;
}

QuadratureRule mixture_rule(const Scenario& scenario, const QuadratureConfig& config) {
  const QuadratureRule base = gauss_legendre(config.nodes_per_component);
  const double sigma = std::sqrt(scenario.sigma_theta_sq);
  const double half = config.half_width_sigmas * sigma;
  const double norm = 1.0 / (std::sqrt(2.0 * kPi) * sigma);

  QuadratureRule out;
  const std::size_t total = base.nodes.size() * scenario.angles.size();
  out.nodes.reserve(total);
  out.weights.reserve(total);
  for (std::size_t k = 0; k < scenario.angles.size(); ++k) {
    if (scenario.probs[k] == 0.0) continue;
    for (std::size_t i = 0; i < base.nodes.size(); ++i) {
      const double t = half * base.nodes[i];
      out.nodes.push_back(scenario.angles[k] + t);
      out.weights.push_back(scenario.probs[k] * half * base.weights[i] * norm *
                            std::exp(-t * t / (2.0 * scenario.sigma_theta_sq)));
    }
  }
  return out;
}

QuadratureRule union_rule(const Scenario& scenario, const QuadratureConfig& config) {
  const QuadratureRule base = gauss_legendre(config.nodes_per_component);
  const double half = config.half_width_sigmas * std::sqrt(scenario.sigma_theta_sq);

  std::vector<std::pair<double, double>> intervals;
  for (double theta : scenario.angles) intervals.emplace_back(theta - half, theta + half);
  std::sort(intervals.begin(), intervals.end());
  std::vector<std::pair<double, double>> merged;
  for (const auto& iv : intervals) {
    if (!merged.empty() && iv.first <= merged.back().second)
      merged.back().second = std::max(merged.back().second, iv.second);
    else
      merged.push_back(iv);
  }

  QuadratureRule out;
  for (const auto& [lo, hi] : merged) {
    const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / (2.0 * half) - 1e-12)));
    const double width = (hi - lo) / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = lo + (p + 0.5) * width;
      for (std::size_t i = 0; i < base.nodes.size(); ++i) {
        out.nodes.push_back(mid + 0.5 * width * base.nodes[i]);
        out.weights.push_back(0.5 * width * base.weights[i]);
      }
    }
  }
  return out;
}

}  // namespace isac
