#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "fhbench/mitigation.hpp"
#include "fhbench/vqe.hpp"
#include "support/oracles.hpp"

using namespace fhbench;

namespace {

std::vector<ReadoutError> random_rates(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(0.0, 0.2);
  std::vector<ReadoutError> out(n);
  for (auto& e : out) e = {d(rng), d(rng)};
  return out;
}

struct Measured {
  QubitHamiltonian h;
  std::vector<CommutingGroup> groups;
  std::vector<CountsTable> counts;
};

Measured measure_ground(std::size_t length, const NoiseModel& noise, std::uint64_t seed) {
  Measured m;
  m.h = build_hamiltonian(length, 1.0, 2.0);
  m.groups = group_commuting(m.h);
  const auto c = build_ladder_circuit(length, analytic_ground_parameters(length));
  for (std::size_t g = 0; g < m.groups.size(); ++g) {
    m.counts.push_back(measure_circuit(c, m.groups[g].basis, 8192, noise, derive_seed(seed, {g})));
  }
  return m;
}

}  // namespace

TEST(Factorized, MatchesKroneckerInverse) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  for (std::size_t n = 1; n <= 6; ++n) {
    const auto cal = CalibrationSet::from_rates(random_rates(n, rng));
    std::vector<Eigen::Matrix2d> inverses;
    for (const auto& m : cal.matrices) inverses.push_back(invert_readout(m));
    const Eigen::MatrixXd full_inverse = oracle::kron_real(cal.matrices).inverse();

    std::vector<double> v(std::size_t{1} << n);
    for (double& x : v) x = d(rng);
    const Eigen::VectorXd expected =
        full_inverse * Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    apply_tensor_factors(v, inverses);
    for (std::size_t i = 0; i < v.size(); ++i) {
      EXPECT_NEAR(v[i], expected(static_cast<Eigen::Index>(i)), 1e-10) << "n=" << n;
    }
  }
}

TEST(Factorized, InfiniteShotRoundTrip) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  for (std::size_t n = 2; n <= 8; ++n) {
    const auto cal = CalibrationSet::from_rates(random_rates(n, rng));
    std::vector<double> p(std::size_t{1} << n);
    double total = 0.0;
    for (double& x : p) total += (x = d(rng));
    for (double& x : p) x /= total;
    std::vector<double> q = p;
    apply_tensor_factors(q, cal.matrices);
    std::vector<Eigen::Matrix2d> inverses;
    for (const auto& m : cal.matrices) inverses.push_back(invert_readout(m));
    apply_tensor_factors(q, inverses);
    for (std::size_t i = 0; i < p.size(); ++i) EXPECT_NEAR(q[i], p[i], 1e-10);
  }
}

TEST(Mitigation, IdentityCalibrationKeepsEmpiricalDistribution) {
  CountsTable t;
  t.n_qubits = 3;
  t.basis = MeasurementBasis::all_z(3);
  t.shots = 8;
  t.counts = {{"000", 5}, {"101", 2}, {"111", 1}};
  const auto q = apply_mitigation(t, CalibrationSet::identity(3));
  EXPECT_EQ(q.weights[0], 5.0 / 8);
  EXPECT_EQ(q.weights[bits_to_index("101")], 2.0 / 8);
  EXPECT_EQ(q.weights[7], 1.0 / 8);
  EXPECT_NEAR(q.sum(), 1.0, 1e-15);
  EXPECT_FALSE(q.used_pseudo_inverse);
}

TEST(Mitigation, SingularMatrixUsesPseudoInverse) {
  Eigen::Matrix2d m;
  m << 0.5, 0.5, 0.5, 0.5;
  bool used = false;
  const auto inv = invert_readout(m, &used);
  EXPECT_TRUE(used);
  EXPECT_LT((m * inv * m - m).cwiseAbs().maxCoeff(), 1e-12);
  invert_readout(Eigen::Matrix2d::Identity(), &used);
  EXPECT_FALSE(used);
}

TEST(Mitigation, QuasiAndPerShotRoutesAgree) {
  const auto noise = NoiseModel::uniform(6, 0.04, 0.07, 0.0, 3);
  const auto m = measure_ground(3, noise, 11);
  const auto cal = calibrate(6, 8192, noise, 12);
  for (std::size_t g = 0; g < m.groups.size(); ++g) {
    const auto& grp = m.groups[g];
    const double via_quasi =
        expectation(apply_mitigation(m.counts[g], cal), DiagonalObservable(grp.terms, grp.basis));
    const MitigatedObservable per_shot(grp.terms, grp.basis, cal);
    double via_shots = 0.0;
    for (const auto& [bits, c] : m.counts[g].counts) {
      via_shots += static_cast<double>(c) * per_shot(bits_to_index(bits));
    }
    via_shots /= static_cast<double>(m.counts[g].shots);
    EXPECT_NEAR(via_quasi, via_shots, 1e-10) << "group " << g;
  }
}

TEST(Mitigation, ZeroNoiseLeavesEnergyUnchanged) {
  const auto noise = NoiseModel::noiseless(2);
  const auto m = measure_ground(3, noise, 5);
  const auto cal = calibrate(6, 8192, noise, 6);
  const auto raw = energy_from_group_counts(m.h, m.groups, m.counts);
  const auto mit = mitigated_energy(m.h, m.groups, m.counts, cal);
  EXPECT_NEAR(raw.value, mit.value, 1e-9);
  EXPECT_NEAR(raw.std_error, mit.std_error, 1e-9);
}

TEST(Mitigation, ReadoutNoiseCorrectedAcrossSeeds) {
  const double exact = -std::numbers::sqrt2;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto noise = NoiseModel::uniform(6, 0.03, 0.03, 0.0, seed);
    const auto m = measure_ground(3, noise, derive_seed(seed, {1}));
    const auto cal = calibrate(6, 8192, noise, derive_seed(seed, {2}));
    const auto raw = energy_from_group_counts(m.h, m.groups, m.counts);
    const auto mit = mitigated_energy(m.h, m.groups, m.counts, cal);
    EXPECT_LT(std::abs(mit.value - exact), std::abs(raw.value - exact)) << "seed " << seed;
    EXPECT_LT(std::abs(mit.value - exact), 5 * mit.std_error) << "seed " << seed;
    EXPECT_GT(mit.std_error, raw.std_error);
  }
}

TEST(Mitigation, GateNoiseIsNotRemoved) {
  auto noise = NoiseModel::uniform(6, 0.0, 0.0, 0.05, 4);
  const auto m = measure_ground(3, noise, 8);
  const auto cal = calibrate(6, 8192, noise, 9);
  const auto raw = energy_from_group_counts(m.h, m.groups, m.counts);
  const auto mit = mitigated_energy(m.h, m.groups, m.counts, cal);
  EXPECT_LT(std::abs(mit.value - raw.value), 3 * raw.std_error);
  EXPECT_GT(std::abs(raw.value + std::numbers::sqrt2), 3 * raw.std_error);
}

TEST(Calibration, TwoCircuitsRegardlessOfSize) {
  const auto noise = NoiseModel::uniform(24, 0.02, 0.05, 0.0, 1);
  const auto cal = calibrate(24, 8192, noise, 3);
  EXPECT_EQ(cal.circuits, 2u);
  EXPECT_EQ(cal.n_qubits, 24u);
  for (std::size_t k = 0; k < 24; ++k) {
    EXPECT_NEAR(cal.rates(k).p10, 0.02, 5 * std::sqrt(0.02 * 0.98 / 8192));
    EXPECT_NEAR(cal.rates(k).p01, 0.05, 5 * std::sqrt(0.05 * 0.95 / 8192));
  }
}

TEST(Calibration, FileRoundTripAndTruncation) {
  std::mt19937_64 rng(1);
  const auto cal = CalibrationSet::from_rates(random_rates(5, rng), 1000, 17);
  std::stringstream s;
  write_calibration(s, cal);
  const auto back = read_calibration(s);
  EXPECT_EQ(back.n_qubits, 5u);
  EXPECT_EQ(back.shots, 1000u);
  EXPECT_EQ(back.seed, 17u);
  for (std::size_t k = 0; k < 5; ++k) {
    EXPECT_EQ(back.rates(k).p10, cal.rates(k).p10);
    EXPECT_EQ(back.rates(k).p01, cal.rates(k).p01);
  }
  EXPECT_EQ(cal.truncated(3).matrices.size(), 3u);
  EXPECT_THROW(cal.truncated(6), std::invalid_argument);
}

TEST(Mitigation, RegisterLimit) {
  CountsTable t;
  t.n_qubits = 26;
  t.basis = MeasurementBasis::all_z(26);
  t.shots = 1;
  t.counts = {{std::string(26, '0'), 1}};
  EXPECT_THROW(apply_mitigation(t, CalibrationSet::identity(26)), std::invalid_argument);
}
