#include "fhbench/estimator.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace fhbench {

namespace {

double parity_sign(std::uint64_t bits, std::uint64_t mask) {
  return (std::popcount(bits & mask) & 1) ? -1.0 : 1.0;
}

void check_counts(const CountsTable& counts) {
  if (counts.shots == 0) throw std::invalid_argument("counts table has zero shots");
  if (counts.total() != counts.shots) {
    throw std::invalid_argument("counts do not sum to the declared shots");
  }
}

}  // namespace

DiagonalObservable::DiagonalObservable(const std::vector<PauliTerm>& terms,
                                       const MeasurementBasis& basis) {
  entries_.reserve(terms.size());
  for (const auto& term : terms) {
    if (!basis.measures(term.string)) {
      throw std::invalid_argument("term " + term.string.to_string() +
                                  " is not diagonal in basis " + basis.to_string());
    }
    entries_.push_back({term.string.support_mask(), term.coeff});
  }
}

double DiagonalObservable::operator()(std::uint64_t bits) const {
  double sum = 0.0;
  for (const auto& e : entries_) sum += e.coeff * parity_sign(bits, e.mask);
  return sum;
}

double pauli_expectation_from_counts(const PauliTerm& term, const CountsTable& counts,
                                     const MeasurementBasis& basis) {
  check_counts(counts);
  if (counts.n_qubits != term.string.size()) {
    throw std::invalid_argument("term and counts cover different registers");
  }
  const DiagonalObservable observable({term}, basis);
  double sum = 0.0;
  for (const auto& [bits, n] : counts.counts) {
    sum += static_cast<double>(n) * observable(bits_to_index(bits));
  }
  return sum / static_cast<double>(counts.shots);
}

EnergyEstimate energy_from_group_counts(const QubitHamiltonian& h,
                                        const std::vector<CommutingGroup>& groups,
                                        const std::vector<CountsTable>& counts) {
  if (counts.size() != groups.size()) {
    throw std::invalid_argument("expected counts for " + std::to_string(groups.size()) +
                                " groups, got " + std::to_string(counts.size()));
  }
  EnergyEstimate estimate;
  estimate.value = h.identity_offset;
  double variance = 0.0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const CountsTable& table = counts[g];
    check_counts(table);
    if (table.n_qubits != h.n_qubits) {
      throw std::invalid_argument("counts register does not match the Hamiltonian");
    }
    if (!(table.basis == groups[g].basis)) {
      throw std::invalid_argument("counts for group " + std::to_string(g) +
                                  " were taken in basis " + table.basis.to_string() +
                                  ", expected " + groups[g].basis.to_string());
    }
    const DiagonalObservable observable(groups[g].terms, table.basis);
    const double m = static_cast<double>(table.shots);

    double sum = 0.0;
    double sum_sq = 0.0;
    for (const auto& [bits, n] : table.counts) {
      const double v = observable(bits_to_index(bits));
      sum += static_cast<double>(n) * v;
      sum_sq += static_cast<double>(n) * v * v;
    }
    const double mean = sum / m;
    double sample_var = 0.0;
    if (table.shots > 1) {
      sample_var = std::max(0.0, (sum_sq - m * mean * mean) / (m - 1.0));
    }
    GroupContribution c{g, mean, sample_var / m, table.shots};
    estimate.value += c.value;
    variance += c.variance;
    estimate.per_group.push_back(c);
  }
  estimate.std_error = std::sqrt(variance);
  return estimate;
}

double energy_statevector(const QubitHamiltonian& h, const StateVector& state) {
  const std::size_t top = state.n_qubits();
  if (h.n_qubits != 2 * top) {
    throw std::invalid_argument("state register is not the top half of the Hamiltonian");
  }
  const std::uint64_t top_mask = (std::uint64_t{1} << top) - 1;
  const auto& amps = state.amplitudes();
  const Amplitude i1(0.0, 1.0);

  double energy = h.identity_offset * state.norm() * state.norm();
  for (const auto& term : h.terms) {
    const std::uint64_t x = term.string.x_mask();
    const std::uint64_t z = term.string.z_mask();
    // <0|P|0> on the bottom block vanishes for any X or Y there.
    if ((x & ~top_mask) != 0) continue;
    const std::uint64_t xt = x & top_mask;
    const std::uint64_t zt = z & top_mask;

    Amplitude phase_y(1.0, 0.0);
    for (std::size_t k = 0; k < term.string.y_count(); ++k) phase_y *= i1;

    Amplitude sum(0.0, 0.0);
    for (std::uint64_t i = 0; i < amps.size(); ++i) {
      if (amps[i] == Amplitude(0.0, 0.0)) continue;
      // P|i> = i^{nY} (-1)^{|i & z|} |i ^ x>
      const double sign = parity_sign(i, zt);
      sum += std::conj(amps[i ^ xt]) * sign * amps[i];
    }
    energy += term.coeff * (phase_y * sum).real();
  }
  return energy;
}

}  // namespace fhbench
