#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fhbench/optimizer.hpp"
#include "fhbench/pauli_model.hpp"
#include "fhbench/simulator.hpp"

namespace fhbench {

struct TraceEntry {
  std::size_t step = 0;
  std::vector<double> parameters;
  double energy = 0.0;
  double std_error = 0.0;
};

struct OptimizerTrace {
  std::vector<TraceEntry> iterations;
  bool converged = false;
  std::vector<double> final_parameters;
  /// Objective value recorded at final_parameters.
  double final_energy = 0.0;
  std::string method;
};

/// Ground-state parameters straight from the oracle's Perron vector.
std::vector<double> analytic_ground_parameters(std::size_t length, double t = 1.0);

/// <H> of the ladder state for `angles`, computed on the statevector.
double ladder_energy(const QubitHamiltonian& h, std::span<const double> angles);

enum class PreoptimizeStart { Analytic, Zero };

struct PreoptimizeOptions {
  double t = 1.0;
  double u = 2.0;
  PreoptimizeStart start = PreoptimizeStart::Analytic;
  std::size_t max_evaluations = 20000;
};

struct PreoptimizeResult {
  std::vector<double> parameters;
  double energy = 0.0;
  /// energy - |t| * exact_gs_energy(L).
  double gap = 0.0;
  bool converged = false;
  std::string message;
  OptimizerTrace trace;
};

/**
 * Classical pre-optimization on the exact statevector energy: starts from
 * the analytic parameters (or zeros) and polishes with the linear
 * trust-region method, stopping at a radius of 1e-10. Never throws on
 * non-convergence; `converged` and `message` report it with the best point.
 */
PreoptimizeResult preoptimize(std::size_t length, const PreoptimizeOptions& options = {});

struct ShotOptimizeOptions {
  double t = 1.0;
  double u = 2.0;
  double rho_begin = 0.5;
};

/**
 * Hybrid loop against energy_from_group_counts: every objective call measures
 * each commuting group with `shots` shots under `noise`, seeded by
 * derive_seed(noise.seed, {Optimizer, call index, group}). Runs the initial
 * evaluation plus at most `max_iter` more; exhaustion is the normal exit.
 */
OptimizerTrace optimize_shotbased(std::size_t length, std::span<const double> init,
                                  std::uint64_t shots, const NoiseModel& noise,
                                  std::size_t max_iter,
                                  const ShotOptimizeOptions& options = {});

/// `step,energy,std_error,theta_0,...`.
void write_trace_csv(std::ostream& out, const OptimizerTrace& trace);

}  // namespace fhbench
