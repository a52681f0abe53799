#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fhbench/estimator.hpp"
#include "support/oracles.hpp"

using namespace fhbench;

namespace {

// Full-register state: top block from `top`, bottom block |0...0>.
oracle::CVector embed_state(const StateVector& top, std::size_t n) {
  oracle::CVector psi = oracle::CVector::Zero(static_cast<Eigen::Index>(1) << n);
  for (std::size_t i = 0; i < top.dimension(); ++i) psi(static_cast<Eigen::Index>(i)) = top[i];
  return psi;
}

oracle::CMatrix dense_terms(const std::vector<PauliTerm>& terms, std::size_t n) {
  const auto dim = static_cast<Eigen::Index>(1) << n;
  oracle::CMatrix out = oracle::CMatrix::Zero(dim, dim);
  for (const auto& t : terms) {
    oracle::CMatrix p = oracle::CMatrix::Identity(dim, dim);
    for (std::size_t k = 0; k < n; ++k) {
      switch (t.string[k]) {
        case PauliOp::X: p = oracle::embed(oracle::pauli_x(), k, n) * p; break;
        case PauliOp::Y: p = oracle::embed(oracle::pauli_y(), k, n) * p; break;
        case PauliOp::Z: p = oracle::embed(oracle::pauli_z(), k, n) * p; break;
        case PauliOp::I: break;
      }
    }
    out += t.coeff * p;
  }
  return out;
}

std::vector<CountsTable> measure_all(const Circuit& c, const std::vector<CommutingGroup>& groups,
                                     std::uint64_t shots, std::uint64_t seed) {
  std::vector<CountsTable> out;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    out.push_back(measure_circuit(c, groups[g].basis, shots, NoiseModel::noiseless(),
                                  derive_seed(seed, {g})));
  }
  return out;
}

}  // namespace

TEST(StatevectorEnergy, MatchesDenseExpectation) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  for (std::size_t length = 2; length <= 4; ++length) {
    const auto h = build_hamiltonian(length, 1.0, 2.0);
    const auto dense = dense_matrix(h);
    for (int rep = 0; rep < 5; ++rep) {
      StateVector s(length);
      for (int g = 0; g < 12; ++g) {
        s.apply(Gate::ry(static_cast<std::size_t>(rng() % length), d(rng)));
        const std::size_t a = rng() % length;
        const std::size_t b = (a + 1) % length;
        s.apply(Gate::cnot(a, b));
        s.apply(Gate::y(b));
      }
      const auto psi = embed_state(s, 2 * length);
      const double ref = (psi.adjoint() * dense.cast<std::complex<double>>() * psi)(0, 0).real();
      EXPECT_NEAR(energy_statevector(h, s), ref, 1e-12);
    }
  }
}

TEST(DiagonalObservable, EvaluatesParities) {
  const std::vector<PauliTerm> terms{{PauliString::parse("XXII"), 2.0},
                                     {PauliString::parse("IIZI"), -1.0}};
  const DiagonalObservable obs(terms, MeasurementBasis::parse("XXZZ"));
  EXPECT_DOUBLE_EQ(obs(0b0000), 1.0);
  EXPECT_DOUBLE_EQ(obs(0b0001), -3.0);
  EXPECT_DOUBLE_EQ(obs(0b0011), 1.0);
  EXPECT_DOUBLE_EQ(obs(0b0100), 3.0);
  EXPECT_THROW(DiagonalObservable(terms, MeasurementBasis::parse("ZZZZ")), std::invalid_argument);
}

TEST(CountsExpectation, HandBuiltTable) {
  CountsTable t;
  t.n_qubits = 2;
  t.basis = MeasurementBasis::all_z(2);
  t.shots = 10;
  t.counts = {{"00", 4}, {"10", 3}, {"11", 3}};
  EXPECT_DOUBLE_EQ(pauli_expectation_from_counts({PauliString::parse("ZI"), 1.0}, t, t.basis), 0.4 - 0.6);
  EXPECT_DOUBLE_EQ(pauli_expectation_from_counts({PauliString::parse("ZZ"), 0.5}, t, t.basis), 0.5 * (0.7 - 0.3));
}

TEST(GroupEnergy, NoiselessWithinStatisticalError) {
  for (std::size_t length = 2; length <= 5; ++length) {
    const auto h = build_hamiltonian(length, 1.0, 2.0);
    const auto groups = group_commuting(h);
    std::vector<double> angles(length - 1, 0.6);
    const auto c = build_ladder_circuit(length, angles);
    const double exact = energy_statevector(h, run_statevector(c));
    const auto est = energy_from_group_counts(h, groups, measure_all(c, groups, 8192, length));
    EXPECT_LT(std::abs(est.value - exact), 5 * est.std_error);
    EXPECT_GT(est.std_error, 0.0);
    EXPECT_EQ(est.per_group.size(), groups.size());
  }
}

TEST(GroupEnergy, StdErrorMatchesTrueVariance) {
  const std::size_t length = 3;
  const auto h = build_hamiltonian(length, 1.0, 2.0);
  const auto groups = group_commuting(h);
  const std::vector<double> angles{0.5, 1.1};
  const auto c = build_ladder_circuit(length, angles);
  const auto psi = embed_state(run_statevector(c), 2 * length);
  double true_var = 0.0;
  for (const auto& g : groups) {
    const auto m = dense_terms(g.terms, 2 * length);
    const double mean = (psi.adjoint() * m * psi)(0, 0).real();
    const double sq = (psi.adjoint() * m * m * psi)(0, 0).real();
    true_var += sq - mean * mean;
  }
  const std::uint64_t shots = 100000;
  const auto est = energy_from_group_counts(h, groups, measure_all(c, groups, shots, 1));
  EXPECT_NEAR(est.std_error, std::sqrt(true_var / shots), 0.03 * std::sqrt(true_var / shots));
}

TEST(GroupEnergy, RejectsMismatchedInput) {
  const auto h = build_hamiltonian(2, 1.0, 2.0);
  const auto groups = group_commuting(h);
  const std::vector<double> angles{0.3};
  auto counts = measure_all(build_ladder_circuit(2, angles), groups, 100, 1);
  counts.pop_back();
  EXPECT_THROW(energy_from_group_counts(h, groups, counts), std::invalid_argument);
  counts = measure_all(build_ladder_circuit(2, angles), groups, 100, 1);
  std::swap(counts[1], counts[2]);
  EXPECT_THROW(energy_from_group_counts(h, groups, counts), std::invalid_argument);
}
