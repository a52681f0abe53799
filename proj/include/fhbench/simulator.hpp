#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "fhbench/ansatz.hpp"
#include "fhbench/pauli_model.hpp"
#include "fhbench/rng.hpp"

namespace fhbench {

using Amplitude = std::complex<double>;

/**
 * Pure state of the top block (qubits 0..L-1). Amplitude index bit k is
 * qubit k; in printed bitstrings qubit 0 is the leftmost character. The
 * bottom block is implicitly |0...0>.
 */
class StateVector {
 public:
  explicit StateVector(std::size_t n_qubits);

  std::size_t n_qubits() const { return n_qubits_; }
  std::size_t dimension() const { return amps_.size(); }
  const std::vector<Amplitude>& amplitudes() const { return amps_; }
  Amplitude operator[](std::size_t i) const { return amps_[i]; }

  void apply(const Gate& gate);
  void apply_hadamard(std::size_t q);
  void apply_s_dagger(std::size_t q);

  double norm() const;

 private:
  std::size_t n_qubits_;
  std::vector<Amplitude> amps_;
};

struct ReadoutError {
  /// P(read 1 | true 0).
  double p10 = 0.0;
  /// P(read 0 | true 1).
  double p01 = 0.0;
};

/**
 * Injected hardware stand-in: independent per-qubit readout flips and a
 * depolarizing kick after every CNOT, sampled by trajectories.
 */
struct NoiseModel {
  /// One entry per qubit; empty means perfect readout on every qubit.
  std::vector<ReadoutError> readout;
  double cnot_depolarizing = 0.0;
  std::size_t trajectories = 64;
  std::uint64_t seed = 0;

  static NoiseModel noiseless(std::uint64_t seed = 0);
  static NoiseModel uniform(std::size_t n_qubits, double p10, double p01,
                            double p2 = 0.0, std::uint64_t seed = 0);

  ReadoutError readout_at(std::size_t qubit) const;
  bool has_readout_noise() const;
  /// Copy restricted to the first `n_qubits` readout entries.
  NoiseModel truncated(std::size_t n_qubits) const;
  void validate() const;
};

/// Shot histogram for one measurement setting.
struct CountsTable {
  std::size_t n_qubits = 0;
  MeasurementBasis basis;
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;
  std::map<std::string, std::uint64_t> counts;

  std::uint64_t total() const;
};

StateVector run_statevector(const Circuit& circuit);

/// H for X axes, S^dagger then H for Y axes, on the top-block qubits only.
StateVector rotate_to_basis(StateVector state, const MeasurementBasis& basis);

/**
 * Draws `shots` N-bit outcomes: top-block bits from the Born distribution of
 * the rotated state, bottom-block bits from |0> (always 0 on a Z axis, a fair
 * coin on X or Y), then independent readout flips. Deterministic in `seed`.
 */
CountsTable sample_counts(const StateVector& state, const MeasurementBasis& basis,
                          std::uint64_t shots, const NoiseModel& noise,
                          std::uint64_t seed);

/// One trajectory: after each CNOT, with probability p2, a uniformly random
/// non-identity two-qubit Pauli on its qubits.
Circuit apply_gate_noise(const Circuit& circuit, const NoiseModel& noise, Rng& rng);

/**
 * Measures `circuit` in `basis` under `noise`. Without gate noise this is a
 * single sample_counts call seeded with derive_seed(stream_seed, {0}); with
 * gate noise the shots are spread over `noise.trajectories` realizations
 * (remainder to the first ones), trajectory j seeded with
 * derive_seed(stream_seed, {j}), and merged in trajectory order.
 */
CountsTable measure_circuit(const Circuit& circuit, const MeasurementBasis& basis,
                            std::uint64_t shots, const NoiseModel& noise,
                            std::uint64_t stream_seed);

/// Readout of a classically prepared bitstring (all qubits measured in Z).
CountsTable sample_prepared(const std::vector<bool>& bits, std::uint64_t shots,
                            const NoiseModel& noise, std::uint64_t seed);

/// Header lines `# basis`, `# shots`, `# seed`, then `<bitstring> <count>`.
void write_counts(std::ostream& out, const CountsTable& counts);
CountsTable read_counts(std::istream& in);

/// Bitstring (qubit 0 leftmost) to integer with bit k = qubit k.
std::uint64_t bits_to_index(const std::string& bits);
std::string index_to_bits(std::uint64_t index, std::size_t n_qubits);

}  // namespace fhbench
