#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fhbench {

using Objective = std::function<double(std::span<const double>)>;

inline constexpr std::string_view kLinearTrustRegionName =
    "cobyla-class linear trust region (unconstrained)";

struct OptimizerOptions {
  /// Initial and final trust-region radius.
  double rho_begin = 0.5;
  double rho_end = 1e-6;
  std::size_t max_evaluations = 1000;
};

struct Evaluation {
  std::size_t index = 0;
  std::vector<double> x;
  double f = 0.0;
};

struct OptimizerResult {
  std::vector<double> x;
  double f = 0.0;
  std::size_t evaluations = 0;
  /// True when the radius reached rho_end; false on budget exhaustion.
  bool converged = false;
  std::string method;
};

/**
 * Derivative-free minimizer in the style of Powell's COBYLA, without
 * constraints. It keeps a simplex of n + 1 points, fits the linear
 * interpolant through them, and steps a distance rho down its gradient from
 * the best vertex. The new point replaces the vertex that keeps the simplex
 * best conditioned. A poor step (actual / predicted reduction <= 0.1) is
 * followed by a geometry repair when the simplex is too flat or too spread,
 * otherwise by halving rho.
 *
 * `on_evaluation` sees every objective call in order.
 */
OptimizerResult minimize_linear_trust_region(
    const Objective& objective, std::vector<double> x0, const OptimizerOptions& options,
    const std::function<void(const Evaluation&)>& on_evaluation = {});

}  // namespace fhbench
