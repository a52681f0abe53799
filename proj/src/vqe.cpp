#include "fhbench/vqe.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "fhbench/ansatz.hpp"
#include "fhbench/estimator.hpp"
#include "fhbench/format.hpp"

namespace fhbench {

std::vector<double> analytic_ground_parameters(std::size_t length, double t) {
  const auto oracle = single_particle_oracle(length, t);
  std::vector<double> target(oracle.ground_vector.data(),
                             oracle.ground_vector.data() + oracle.ground_vector.size());
  try {
    return solve_parameters(target);
  } catch (const UnrepresentableTarget&) {
    for (double& c : target) c = -c;
    return solve_parameters(target);
  }
}

double ladder_energy(const QubitHamiltonian& h, std::span<const double> angles) {
  const Circuit circuit = build_ladder_circuit(h.chain_length(), angles);
  return energy_statevector(h, run_statevector(circuit));
}

PreoptimizeResult preoptimize(std::size_t length, const PreoptimizeOptions& options) {
  const QubitHamiltonian h = build_hamiltonian(length, options.t, options.u);
  const double exact = std::abs(options.t) * exact_gs_energy(length);

  std::vector<double> start(length - 1, 0.0);
  OptimizerOptions opt;
  opt.rho_end = 1e-10;
  opt.max_evaluations = options.max_evaluations;
  if (options.start == PreoptimizeStart::Analytic) {
    start = analytic_ground_parameters(length, options.t);
    opt.rho_begin = 1e-3;
  } else {
    opt.rho_begin = 0.5;
  }

  PreoptimizeResult out;
  auto record = [&out](const Evaluation& e) {
    out.trace.iterations.push_back({e.index, e.x, e.f, 0.0});
  };
  const auto result = minimize_linear_trust_region(
      [&h](std::span<const double> x) { return ladder_energy(h, x); }, start, opt, record);

  out.parameters = result.x;
  out.energy = result.f;
  out.gap = result.f - exact;
  out.trace.method = result.method;
  out.trace.converged = result.converged;
  out.trace.final_parameters = result.x;
  out.trace.final_energy = result.f;
  out.converged = result.converged && std::abs(out.gap) <= 1e-8;
  if (!result.converged) {
    out.message = "evaluation budget exhausted; best point returned";
  } else if (!out.converged) {
    out.message = "optimizer stopped " + format_general(out.gap, 3) +
                  " above the exact energy";
  }
  return out;
}

OptimizerTrace optimize_shotbased(std::size_t length, std::span<const double> init,
                                  std::uint64_t shots, const NoiseModel& noise,
                                  std::size_t max_iter,
                                  const ShotOptimizeOptions& options) {
  if (init.size() != length - 1) {
    throw std::invalid_argument("initial point needs " + std::to_string(length - 1) +
                                " parameters");
  }
  if (shots < 1) throw std::invalid_argument("shots must be >= 1");
  const QubitHamiltonian h = build_hamiltonian(length, options.t, options.u);
  const auto groups = group_commuting(h);
  const NoiseModel model = noise.truncated(h.n_qubits);

  OptimizerTrace trace;
  std::size_t call = 0;
  double last_std_error = 0.0;
  auto objective = [&](std::span<const double> x) {
    const Circuit circuit = build_ladder_circuit(length, x);
    const std::uint64_t seed = derive_seed(noise.seed, {tag(Stream::Optimizer), call});
    std::vector<CountsTable> counts;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      counts.push_back(measure_circuit(circuit, groups[g].basis, shots, model,
                                       derive_seed(seed, {g})));
    }
    const auto estimate = energy_from_group_counts(h, groups, counts);
    ++call;
    last_std_error = estimate.std_error;
    return estimate.value;
  };
  auto record = [&](const Evaluation& e) {
    trace.iterations.push_back({e.index, e.x, e.f, last_std_error});
  };

  OptimizerOptions opt;
  opt.rho_begin = options.rho_begin;
  opt.rho_end = 1e-12;
  opt.max_evaluations = max_iter + 1;
  const auto result = minimize_linear_trust_region(
      objective, std::vector<double>(init.begin(), init.end()), opt, record);

  trace.method = result.method;
  trace.converged = result.converged;
  trace.final_parameters = result.x;
  trace.final_energy = result.f;
  return trace;
}

void write_trace_csv(std::ostream& out, const OptimizerTrace& trace) {
  const std::size_t n = trace.iterations.empty() ? trace.final_parameters.size()
                                                 : trace.iterations.front().parameters.size();
  out << "step,energy,std_error";
  for (std::size_t k = 0; k < n; ++k) out << ",theta_" << k;
  out << '\n';
  for (const auto& e : trace.iterations) {
    out << e.step << ',' << format_exact(e.energy) << ',' << format_exact(e.std_error);
    for (double p : e.parameters) out << ',' << format_exact(p);
    out << '\n';
  }
}

}  // namespace fhbench
