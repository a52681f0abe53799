#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fhbench {

/// Y, Z only appear in noise realizations; ansatz circuits use X, CNOT, RY
/// and RY_DAG. RY(a) applies Ry(a) = exp(-i a Y / 2); RY_DAG(a) applies
/// Ry(a)^dagger = Ry(-a).
enum class GateKind { X, Y, Z, CNOT, RY, RY_DAG };

struct Gate {
  GateKind kind = GateKind::X;
  /// CNOT: {control, target}. Single-qubit gates use qubits[0].
  std::size_t qubits[2] = {0, 0};
  double angle = 0.0;

  static Gate x(std::size_t q) { return {GateKind::X, {q, 0}, 0.0}; }
  static Gate y(std::size_t q) { return {GateKind::Y, {q, 0}, 0.0}; }
  static Gate z(std::size_t q) { return {GateKind::Z, {q, 0}, 0.0}; }
  static Gate cnot(std::size_t control, std::size_t target) {
    return {GateKind::CNOT, {control, target}, 0.0};
  }
  static Gate ry(std::size_t q, double a) { return {GateKind::RY, {q, 0}, a}; }
  static Gate ry_dag(std::size_t q, double a) {
    return {GateKind::RY_DAG, {q, 0}, a};
  }

  std::size_t arity() const { return kind == GateKind::CNOT ? 2 : 1; }
};

/**
 * Gate list on N = 2L qubits. Ladder circuits only touch the top block
 * (qubits 0..L-1); every qubit is measured.
 */
struct Circuit {
  std::size_t n_qubits = 0;
  std::vector<Gate> gates;
  std::vector<double> parameters;

  std::size_t count(GateKind kind) const;
  /// Throws if a gate is malformed or touches a qubit >= `limit`.
  void validate(std::size_t limit) const;
};

/// Amplitudes c_0..c_{L-1} over the single-excitation states |1 at k>.
using CoefficientVector = std::vector<double>;

/**
 * Thrown by solve_parameters when the target needs a negative trailing
 * coefficient, which principal-branch angles cannot produce. Negating the
 * whole target (a global phase) always makes it representable.
 */
class UnrepresentableTarget : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/**
 * The particle-conserving two-qubit gate
 *
 *   [1     0       0     0]
 *   [0   sin t   cos t   0]
 *   [0   cos t  -sin t   0]
 *   [0     0       0     1]
 *
 * acting on (first, second) with basis index b_first + 2 b_second, the same
 * little-endian indexing the simulator uses. Applied to the pair (k, k+1)
 * with qubit k excited it yields sin t |k> + cos t |k+1>.
 */
Eigen::Matrix4d a_gate_matrix(double theta);

/// Angle t' carried by both RY_DAG(t') and RY(t') in the A-gate
/// decompositions. t' = -theta reproduces a_gate_matrix(theta) exactly, so
/// RY_DAG applies Ry(theta) and RY applies Ry(-theta).
inline double decomposition_angle(double theta) { return -theta; }

/**
 * Three-CNOT decomposition of A(theta) valid on any input:
 * CNOT(lower->upper), RY_DAG(lower), CNOT(upper->lower), RY(lower),
 * CNOT(lower->upper). Equal to a_gate_matrix(theta) exactly.
 */
std::vector<Gate> decompose_a_full(double theta, std::size_t upper = 0,
                                   std::size_t lower = 1);

/**
 * Ladder ansatz on 2L qubits: X on qubit 0, then the reduced first A gate on
 * (0,1) with one CNOT, then reduced A gates with two CNOTs each on (1,2) ..
 * (L-2, L-1). The reductions assume the ladder's own input state.
 */
Circuit build_ladder_circuit(std::size_t length, std::span<const double> angles);

/// Same ladder built from decompose_a_full fragments (3 CNOTs per A gate).
Circuit build_unsimplified_ladder_circuit(std::size_t length,
                                          std::span<const double> angles);

/// c_0 = sin t_0, c_k = sin t_k prod_{j<k} cos t_j, c_{L-1} = prod cos t_j.
CoefficientVector state_coefficients(std::span<const double> angles);

/// Inverse hyperspherical map onto principal-branch angles.
std::vector<double> solve_parameters(std::span<const double> target);

struct GateCounts {
  std::size_t cnots = 0;
  std::size_t parameters = 0;
  bool operator==(const GateCounts&) const = default;
};

/// (2L - 3, L - 1).
GateCounts gate_counts(std::size_t length);

/// OpenQASM 2.0 with x / cx / ry and a measurement of every qubit.
std::string to_qasm(const Circuit& circuit);

/// One gate per line, e.g. "ry(0.5) q[1]".
void write_circuit_text(std::ostream& out, const Circuit& circuit);

}  // namespace fhbench
