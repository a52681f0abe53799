#include "fhbench/ansatz.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include "fhbench/format.hpp"

namespace fhbench {

namespace {

constexpr double kResidualTolerance = 1e-12;

void require_length(std::size_t length) {
  if (length < 2) {
    throw std::invalid_argument("chain length must be at least 2, got " +
                                std::to_string(length));
  }
}

void require_angles(std::size_t length, std::span<const double> angles) {
  if (angles.size() != length - 1) {
    throw std::invalid_argument("ladder of length " + std::to_string(length) +
                                " takes " + std::to_string(length - 1) +
                                " angles, got " + std::to_string(angles.size()));
  }
  for (double a : angles) {
    if (!std::isfinite(a)) throw std::invalid_argument("non-finite angle");
  }
}

// A(theta) on (k, k+1) for the k = 0 gate, whose input is |1 0>.
void append_reduced_first(std::vector<Gate>& gates, double theta) {
  const double a = decomposition_angle(theta);
  gates.push_back(Gate::ry_dag(1, a));
  gates.push_back(Gate::x(1));
  gates.push_back(Gate::ry(1, a));
  gates.push_back(Gate::cnot(1, 0));
}

// A(theta) on (k, k+1) for k > 0, whose input has qubit k+1 in |0>.
void append_reduced(std::vector<Gate>& gates, double theta, std::size_t upper,
                    std::size_t lower) {
  const double a = decomposition_angle(theta);
  gates.push_back(Gate::ry_dag(lower, a));
  gates.push_back(Gate::cnot(upper, lower));
  gates.push_back(Gate::ry(lower, a));
  gates.push_back(Gate::cnot(lower, upper));
}

const char* qasm_name(GateKind kind) {
  switch (kind) {
    case GateKind::X: return "x";
    case GateKind::Y: return "y";
    case GateKind::Z: return "z";
    case GateKind::CNOT: return "cx";
    case GateKind::RY:
    case GateKind::RY_DAG: return "ry";
  }
  return "?";
}

}  // namespace

std::size_t Circuit::count(GateKind kind) const {
  return static_cast<std::size_t>(std::count_if(
      gates.begin(), gates.end(), [kind](const Gate& g) { return g.kind == kind; }));
}

void Circuit::validate(std::size_t limit) const {
  for (const Gate& g : gates) {
    for (std::size_t i = 0; i < g.arity(); ++i) {
      if (g.qubits[i] >= limit) {
        throw std::invalid_argument("gate on qubit " + std::to_string(g.qubits[i]) +
                                    " outside the simulated register of " +
                                    std::to_string(limit));
      }
    }
    if (g.kind == GateKind::CNOT && g.qubits[0] == g.qubits[1]) {
      throw std::invalid_argument("CNOT control and target coincide");
    }
    if (!std::isfinite(g.angle)) throw std::invalid_argument("non-finite angle");
  }
}

Eigen::Matrix4d a_gate_matrix(double theta) {
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  Eigen::Matrix4d m;
  m << 1, 0, 0, 0,
       0, s, c, 0,
       0, c, -s, 0,
       0, 0, 0, 1;
  return m;
}

std::vector<Gate> decompose_a_full(double theta, std::size_t upper,
                                   std::size_t lower) {
  const double a = decomposition_angle(theta);
  return {Gate::cnot(lower, upper), Gate::ry_dag(lower, a),
          Gate::cnot(upper, lower), Gate::ry(lower, a),
          Gate::cnot(lower, upper)};
}

Circuit build_ladder_circuit(std::size_t length, std::span<const double> angles) {
  require_length(length);
  require_angles(length, angles);
  Circuit c;
  c.n_qubits = 2 * length;
  c.parameters.assign(angles.begin(), angles.end());
  c.gates.push_back(Gate::x(0));
  append_reduced_first(c.gates, angles[0]);
  for (std::size_t k = 1; k + 1 < length; ++k) {
    append_reduced(c.gates, angles[k], k, k + 1);
  }
  return c;
}

Circuit build_unsimplified_ladder_circuit(std::size_t length,
                                          std::span<const double> angles) {
  require_length(length);
  require_angles(length, angles);
  Circuit c;
  c.n_qubits = 2 * length;
  c.parameters.assign(angles.begin(), angles.end());
  c.gates.push_back(Gate::x(0));
  for (std::size_t k = 0; k + 1 < length; ++k) {
    auto fragment = decompose_a_full(angles[k], k, k + 1);
    c.gates.insert(c.gates.end(), fragment.begin(), fragment.end());
  }
  return c;
}

CoefficientVector state_coefficients(std::span<const double> angles) {
  if (angles.empty()) {
    throw std::invalid_argument("need at least one angle (L >= 2)");
  }
  CoefficientVector c(angles.size() + 1);
  double prefix = 1.0;
  for (std::size_t k = 0; k < angles.size(); ++k) {
    c[k] = prefix * std::sin(angles[k]);
    prefix *= std::cos(angles[k]);
  }
  c.back() = prefix;
  return c;
}

std::vector<double> solve_parameters(std::span<const double> target) {
  if (target.size() < 2) {
    throw std::invalid_argument("target needs at least two coefficients");
  }
  const double norm2 = std::inner_product(target.begin(), target.end(),
                                          target.begin(), 0.0);
  if (!std::isfinite(norm2) || std::abs(norm2 - 1.0) > 1e-8) {
    throw std::invalid_argument("target coefficients are not normalized");
  }
  const std::size_t n = target.size();
  if (target.back() < -kResidualTolerance) {
    throw UnrepresentableTarget(
        "negative trailing coefficient is unreachable on principal branches; "
        "negate the target");
  }

  // tail[k] = || c_k .. c_{n-1} ||. atan2 against the tail norm is the stable
  // form of theta_k = asin(c_k / prod_{j<k} cos theta_j).
  std::vector<double> tail(n + 1, 0.0);
  for (std::size_t k = n; k-- > 0;) tail[k] = std::hypot(tail[k + 1], target[k]);

  std::vector<double> angles(n - 1, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (tail[k] < kResidualTolerance) break;
    const double rest = (k + 2 == n) ? std::max(target[n - 1], 0.0) : tail[k + 1];
    angles[k] = std::atan2(target[k], rest);
  }
  return angles;
}

GateCounts gate_counts(std::size_t length) {
  require_length(length);
  return {2 * length - 3, length - 1};
}

std::string to_qasm(const Circuit& circuit) {
  std::ostringstream out;
  out << "OPENQASM 2.0;\n"
      << "include \"qelib1.inc\";\n"
      << "qreg q[" << circuit.n_qubits << "];\n"
      << "creg c[" << circuit.n_qubits << "];\n";
  for (const Gate& g : circuit.gates) {
    out << qasm_name(g.kind);
    if (g.kind == GateKind::RY) out << '(' << format_exact(g.angle) << ')';
    if (g.kind == GateKind::RY_DAG) out << '(' << format_exact(-g.angle) << ')';
    out << " q[" << g.qubits[0] << ']';
    if (g.kind == GateKind::CNOT) out << ",q[" << g.qubits[1] << ']';
    out << ";\n";
  }
  for (std::size_t q = 0; q < circuit.n_qubits; ++q) {
    out << "measure q[" << q << "] -> c[" << q << "];\n";
  }
  return out.str();
}

void write_circuit_text(std::ostream& out, const Circuit& circuit) {
  out << "# qubits " << circuit.n_qubits << '\n';
  out << "# parameters";
  for (double p : circuit.parameters) out << ' ' << format_exact(p);
  out << '\n';
  for (const Gate& g : circuit.gates) {
    switch (g.kind) {
      case GateKind::CNOT:
        out << "cx q[" << g.qubits[0] << "] -> q[" << g.qubits[1] << "]\n";
        break;
      case GateKind::RY:
        out << "ry(" << format_exact(g.angle) << ") q[" << g.qubits[0] << "]\n";
        break;
      case GateKind::RY_DAG:
        out << "ry_dag(" << format_exact(g.angle) << ") q[" << g.qubits[0]
            << "]\n";
        break;
      default:
        out << qasm_name(g.kind) << " q[" << g.qubits[0] << "]\n";
    }
  }
}

}  // namespace fhbench
