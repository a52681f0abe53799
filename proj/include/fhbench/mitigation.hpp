#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fhbench/estimator.hpp"
#include "fhbench/simulator.hpp"

namespace fhbench {

/// Largest register mitigated; the dense quasi-distribution holds 2^N values.
inline constexpr std::size_t kMaxMitigationQubits = 25;

/// Singular values below this are dropped when inverting a readout matrix.
inline constexpr double kPseudoInverseCutoff = 1e-10;

/**
 * Per-qubit readout matrices. Column j of matrices[k] is the distribution of
 * the bit read on qubit k when j was prepared, so (0,1) holds p01 and (1,0)
 * holds p10.
 */
struct CalibrationSet {
  std::size_t n_qubits = 0;
  std::vector<Eigen::Matrix2d> matrices;
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;
  std::size_t circuits = 0;

  static CalibrationSet identity(std::size_t n_qubits);
  static CalibrationSet from_rates(const std::vector<ReadoutError>& rates,
                                   std::uint64_t shots = 0, std::uint64_t seed = 0);

  ReadoutError rates(std::size_t qubit) const;
  CalibrationSet truncated(std::size_t n_qubits) const;
  void validate() const;
};

struct QuasiDistribution {
  std::size_t n_qubits = 0;
  /// Index bit k = qubit k. Entries may be negative.
  std::vector<double> weights;
  bool used_pseudo_inverse = false;

  double sum() const;
};

/**
 * Two readout-only circuits (all zeros, all ones) over every qubit, sampled
 * with `shots` each; per-qubit flip rates come from the marginals.
 */
CalibrationSet calibrate(std::size_t n_qubits, std::uint64_t shots,
                         const NoiseModel& noise, std::uint64_t seed);

/// Inverse, or the SVD pseudo-inverse if a singular value is below cutoff.
Eigen::Matrix2d invert_readout(const Eigen::Matrix2d& m, bool* used_pseudo = nullptr);

/**
 * In place: vector <- (F_{N-1} x ... x F_0) vector, one 2x2 factor per
 * tensor index, N passes of 2^N / 2 pair updates each.
 */
void apply_tensor_factors(std::span<double> vector,
                          std::span<const Eigen::Matrix2d> factors);

/// Densifies counts / M and applies each qubit's inverse readout matrix.
QuasiDistribution apply_mitigation(const CountsTable& counts, const CalibrationSet& cal);

/// sum_b q(b) * observable(b).
double expectation(const QuasiDistribution& q, const DiagonalObservable& observable);

/**
 * Per-shot form of the mitigated observable: g'(b) = [(M^-1)^T g](b), which
 * factorizes per term. Its mean over the raw shots equals the quasi-
 * distribution expectation; its sample variance gives the mitigated error.
 */
class MitigatedObservable {
 public:
  MitigatedObservable(const std::vector<PauliTerm>& terms, const MeasurementBasis& basis,
                      const CalibrationSet& cal);

  double operator()(std::uint64_t bits) const;

 private:
  std::size_t n_qubits_;
  std::vector<DiagonalObservable::Entry> entries_;
  // weights_[k][b]: factor for qubit k reading bit b, off / on support.
  std::vector<std::array<double, 2>> off_support_;
  std::vector<std::array<double, 2>> on_support_;
};

/**
 * Same structure as energy_from_group_counts, with each group's value taken
 * against its quasi-distribution (negative weights kept).
 */
EnergyEstimate mitigated_energy(const QubitHamiltonian& h,
                                const std::vector<CommutingGroup>& groups,
                                const std::vector<CountsTable>& counts,
                                const CalibrationSet& cal);

/// Header `# qubits`, `# shots`, `# seed`, then `k p10 p01` per qubit.
void write_calibration(std::ostream& out, const CalibrationSet& cal);
CalibrationSet read_calibration(std::istream& in);

}  // namespace fhbench
