#pragma once

#include <cstdint>
#include <vector>

#include "fhbench/pauli_model.hpp"
#include "fhbench/simulator.hpp"

namespace fhbench {

struct GroupContribution {
  std::size_t group = 0;
  double value = 0.0;
  /// Variance of `value` as an estimator (already divided by shots).
  double variance = 0.0;
  std::uint64_t shots = 0;
};

struct EnergyEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::vector<GroupContribution> per_group;
};

/**
 * A group's terms evaluated on a measured bitstring: each term contributes
 * coeff * (-1)^(parity of the bits on its support) once the qubits have been
 * rotated to the group's axes.
 */
class DiagonalObservable {
 public:
  DiagonalObservable(const std::vector<PauliTerm>& terms,
                     const MeasurementBasis& basis);

  double operator()(std::uint64_t bits) const;

  struct Entry {
    std::uint64_t mask;
    double coeff;
  };
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
};

/// coeff * sum_b (count(b) / M) (-1)^(parity of b on the term's support).
double pauli_expectation_from_counts(const PauliTerm& term, const CountsTable& counts,
                                     const MeasurementBasis& basis);

/**
 * identity_offset plus every group's sample mean. Terms sharing a group come
 * from the same shots, so each group's variance is the sample variance of the
 * per-shot group value (covariances included); groups are independent.
 */
EnergyEstimate energy_from_group_counts(const QubitHamiltonian& h,
                                        const std::vector<CommutingGroup>& groups,
                                        const std::vector<CountsTable>& counts);

/// Exact <H> by Pauli action on the top-block state, bottom block |0>.
double energy_statevector(const QubitHamiltonian& h, const StateVector& state);

}  // namespace fhbench
