#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace fhbench {

enum class PauliOp : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char to_char(PauliOp op);
PauliOp pauli_from_char(char c);

/**
 * A tensor product of single-qubit Paulis on N qubits.
 *
 * Position k is qubit k. Qubits 0..L-1 hold the spin-up orbitals of sites
 * 1..L and qubits L..2L-1 the spin-down orbitals. Strings print with qubit 0
 * leftmost, e.g. "XXII" is X on qubits 0 and 1.
 */
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(std::size_t n_qubits);
  explicit PauliString(std::vector<PauliOp> ops);

  static PauliString parse(std::string_view text);

  std::size_t size() const { return ops_.size(); }
  PauliOp operator[](std::size_t k) const { return ops_[k]; }
  void set(std::size_t k, PauliOp op) { ops_.at(k) = op; }
  const std::vector<PauliOp>& ops() const { return ops_; }

  bool is_identity() const;
  /// True when every position is I or Z.
  bool is_diagonal() const;
  std::vector<std::size_t> support() const;

  /// Bit k set when qubit k carries X or Y.
  std::uint64_t x_mask() const;
  /// Bit k set when qubit k carries Z or Y.
  std::uint64_t z_mask() const;
  /// Bit k set when qubit k is not I.
  std::uint64_t support_mask() const;
  std::size_t y_count() const;

  std::string to_string() const;

  auto operator<=>(const PauliString&) const = default;
  bool operator==(const PauliString&) const = default;

 private:
  std::vector<PauliOp> ops_;
};

struct PauliTerm {
  PauliString string;
  double coeff = 0.0;

  bool operator==(const PauliTerm&) const = default;
};

/**
 * Real-weighted sum of Pauli strings. The all-identity component is held in
 * `identity_offset`; `terms` never contains the identity string or
 * duplicates.
 */
struct QubitHamiltonian {
  std::size_t n_qubits = 0;
  double identity_offset = 0.0;
  std::vector<PauliTerm> terms;

  /// Chain length L = N / 2.
  std::size_t chain_length() const { return n_qubits / 2; }

  /// Merges duplicate strings, folds identities into the offset and prunes
  /// coefficients below 1e-12.
  static QubitHamiltonian from_terms(std::size_t n_qubits,
                                     const std::vector<PauliTerm>& raw);
};

/**
 * Per-qubit measurement axes. Every qubit is rotated to one of X, Y or Z
 * before a computational-basis readout.
 */
class MeasurementBasis {
 public:
  MeasurementBasis() = default;
  explicit MeasurementBasis(std::vector<PauliOp> axes);
  static MeasurementBasis all_z(std::size_t n_qubits);
  static MeasurementBasis parse(std::string_view text);

  std::size_t size() const { return axes_.size(); }
  PauliOp operator[](std::size_t k) const { return axes_[k]; }
  const std::vector<PauliOp>& axes() const { return axes_; }

  /// True when `s` is diagonal after rotating each qubit to its axis.
  bool measures(const PauliString& s) const;

  std::string to_string() const;

  bool operator==(const MeasurementBasis&) const = default;

 private:
  std::vector<PauliOp> axes_;
};

enum class GroupKind { Diagonal, XXEven, XXOdd, YYEven, YYOdd };

std::string_view to_string(GroupKind kind);

struct CommutingGroup {
  GroupKind kind = GroupKind::Diagonal;
  std::vector<PauliTerm> terms;
  MeasurementBasis basis;
  /// Non-zero only for the diagonal group.
  double identity_offset = 0.0;
};

struct SingleParticleOracle {
  std::size_t length = 0;
  Eigen::MatrixXd hopping;
  double ground_energy = 0.0;
  Eigen::VectorXd ground_vector;
};

/// Jordan-Wigner Fermi-Hubbard Hamiltonian on 2L qubits with open
/// boundaries and spin-block ordering.
QubitHamiltonian build_hamiltonian(std::size_t length, double t, double u);

/// Single-particle ground energy 2 cos(L pi / (L + 1)) in units of t.
double exact_gs_energy(std::size_t length);

SingleParticleOracle single_particle_oracle(std::size_t length, double t = 1.0);

/**
 * Splits a chain Hamiltonian into at most five qubit-wise commuting groups:
 * the diagonal terms, then XX on even bonds, XX on odd bonds, YY on even
 * bonds and YY on odd bonds. Bonds are numbered consecutively over both spin
 * blocks (up-block bonds 0..L-2, then down-block bonds L-1..2L-3), so bonds
 * sharing a parity never share a qubit. Empty groups are dropped.
 *
 * Throws std::logic_error if a term fits none of the groups.
 */
std::vector<CommutingGroup> group_commuting(const QubitHamiltonian& h);

inline constexpr std::size_t kMaxDenseQubits = 16;

/// Explicit 2^N x 2^N matrix, basis index bit k = qubit k. N <= 16.
Eigen::MatrixXd dense_matrix(const QubitHamiltonian& h);

/// `<coeff> <string>` per line, identity first.
void write_hamiltonian(std::ostream& out, const QubitHamiltonian& h);
QubitHamiltonian read_hamiltonian(std::istream& in);

}  // namespace fhbench
