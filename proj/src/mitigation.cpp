#include "fhbench/mitigation.hpp"

#include <bit>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "fhbench/format.hpp"

namespace fhbench {

namespace {

Eigen::Matrix2d readout_matrix(double p10, double p01) {
  Eigen::Matrix2d m;
  m << 1.0 - p10, p01,
       p10, 1.0 - p01;
  return m;
}

void check_register(std::size_t n_qubits) {
  if (n_qubits > kMaxMitigationQubits) {
    throw std::invalid_argument("mitigation supports fewer than 26 qubits, got " +
                                std::to_string(n_qubits));
  }
}

}  // namespace

// CalibrationSet

CalibrationSet CalibrationSet::identity(std::size_t n_qubits) {
  CalibrationSet cal;
  cal.n_qubits = n_qubits;
  cal.matrices.assign(n_qubits, Eigen::Matrix2d::Identity());
  return cal;
}

CalibrationSet CalibrationSet::from_rates(const std::vector<ReadoutError>& rates,
                                          std::uint64_t shots, std::uint64_t seed) {
  CalibrationSet cal;
  cal.n_qubits = rates.size();
  cal.shots = shots;
  cal.seed = seed;
  for (const auto& r : rates) cal.matrices.push_back(readout_matrix(r.p10, r.p01));
  cal.validate();
  return cal;
}

ReadoutError CalibrationSet::rates(std::size_t qubit) const {
  const auto& m = matrices.at(qubit);
  return {m(1, 0), m(0, 1)};
}

CalibrationSet CalibrationSet::truncated(std::size_t n) const {
  if (n > n_qubits) {
    throw std::invalid_argument("calibration covers " + std::to_string(n_qubits) +
                                " qubits, need " + std::to_string(n));
  }
  CalibrationSet cal = *this;
  cal.n_qubits = n;
  cal.matrices.resize(n);
  return cal;
}

void CalibrationSet::validate() const {
  if (matrices.size() != n_qubits) {
    throw std::invalid_argument("calibration needs one matrix per qubit");
  }
  for (const auto& m : matrices) {
    for (int j = 0; j < 2; ++j) {
      if (std::abs(m(0, j) + m(1, j) - 1.0) > 1e-12) {
        throw std::invalid_argument("readout matrix columns must sum to 1");
      }
      for (int i = 0; i < 2; ++i) {
        if (!(m(i, j) >= 0.0 && m(i, j) <= 1.0)) {
          throw std::invalid_argument("readout matrix entries must lie in [0, 1]");
        }
      }
    }
  }
}

double QuasiDistribution::sum() const {
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

// Calibration

CalibrationSet calibrate(std::size_t n_qubits, std::uint64_t shots,
                         const NoiseModel& noise, std::uint64_t seed) {
  if (shots < 1) throw std::invalid_argument("calibration shots must be >= 1");
  const NoiseModel model = noise.truncated(n_qubits);
  const auto zeros = sample_prepared(std::vector<bool>(n_qubits, false), shots, model,
                                     derive_seed(seed, {0}));
  const auto ones = sample_prepared(std::vector<bool>(n_qubits, true), shots, model,
                                    derive_seed(seed, {1}));

  // ones_read[k] = number of shots reading 1 on qubit k.
  auto marginal_ones = [n_qubits](const CountsTable& table) {
    std::vector<std::uint64_t> ones_read(n_qubits, 0);
    for (const auto& [bits, n] : table.counts) {
      for (std::size_t k = 0; k < n_qubits; ++k) {
        if (bits[k] == '1') ones_read[k] += n;
      }
    }
    return ones_read;
  };
  const auto from_zero = marginal_ones(zeros);
  const auto from_one = marginal_ones(ones);

  CalibrationSet cal;
  cal.n_qubits = n_qubits;
  cal.shots = shots;
  cal.seed = seed;
  cal.circuits = 2;
  const double m = static_cast<double>(shots);
  for (std::size_t k = 0; k < n_qubits; ++k) {
    const double p10 = static_cast<double>(from_zero[k]) / m;
    const double p01 = static_cast<double>(shots - from_one[k]) / m;
    cal.matrices.push_back(readout_matrix(p10, p01));
  }
  return cal;
}

Eigen::Matrix2d invert_readout(const Eigen::Matrix2d& m, bool* used_pseudo) {
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sigma = svd.singularValues();
  const bool singular = sigma(1) < kPseudoInverseCutoff;
  if (used_pseudo) *used_pseudo = singular;
  if (!singular) return m.inverse();
  Eigen::Matrix2d inv_sigma = Eigen::Matrix2d::Zero();
  for (int i = 0; i < 2; ++i) {
    if (sigma(i) >= kPseudoInverseCutoff) inv_sigma(i, i) = 1.0 / sigma(i);
  }
  return svd.matrixV() * inv_sigma * svd.matrixU().transpose();
}

void apply_tensor_factors(std::span<double> vector,
                          std::span<const Eigen::Matrix2d> factors) {
  const std::size_t n = factors.size();
  if (vector.size() != (std::size_t{1} << n)) {
    throw std::invalid_argument("vector length is not 2^N for the given factors");
  }
  for (std::size_t k = 0; k < n; ++k) {
    const Eigen::Matrix2d& f = factors[k];
    const double a = f(0, 0), b = f(0, 1), c = f(1, 0), d = f(1, 1);
    const std::size_t stride = std::size_t{1} << k;
    for (std::size_t base = 0; base < vector.size(); base += 2 * stride) {
      for (std::size_t i = base; i < base + stride; ++i) {
        const double v0 = vector[i];
        const double v1 = vector[i + stride];
        vector[i] = a * v0 + b * v1;
        vector[i + stride] = c * v0 + d * v1;
      }
    }
  }
}

QuasiDistribution apply_mitigation(const CountsTable& counts, const CalibrationSet& cal) {
  if (counts.n_qubits != cal.n_qubits) {
    throw std::invalid_argument("counts cover " + std::to_string(counts.n_qubits) +
                                " qubits but calibration covers " +
                                std::to_string(cal.n_qubits));
  }
  check_register(counts.n_qubits);
  if (counts.shots == 0) throw std::invalid_argument("counts table has zero shots");

  QuasiDistribution q;
  q.n_qubits = counts.n_qubits;
  q.weights.assign(std::size_t{1} << q.n_qubits, 0.0);
  const double m = static_cast<double>(counts.shots);
  for (const auto& [bits, n] : counts.counts) {
    q.weights[bits_to_index(bits)] += static_cast<double>(n) / m;
  }

  std::vector<Eigen::Matrix2d> inverses;
  inverses.reserve(cal.n_qubits);
  for (const auto& mk : cal.matrices) {
    bool pseudo = false;
    inverses.push_back(invert_readout(mk, &pseudo));
    q.used_pseudo_inverse = q.used_pseudo_inverse || pseudo;
  }
  apply_tensor_factors(q.weights, inverses);
  return q;
}

double expectation(const QuasiDistribution& q, const DiagonalObservable& observable) {
  double total = 0.0;
  for (const auto& e : observable.entries()) {
    double term = 0.0;
    for (std::size_t i = 0; i < q.weights.size(); ++i) {
      term += q.weights[i] * (1.0 - 2.0 * (std::popcount(i & e.mask) & 1));
    }
    total += e.coeff * term;
  }
  return total;
}

// MitigatedObservable

MitigatedObservable::MitigatedObservable(const std::vector<PauliTerm>& terms,
                                         const MeasurementBasis& basis,
                                         const CalibrationSet& cal)
    : n_qubits_(cal.n_qubits) {
  if (basis.size() != cal.n_qubits) {
    throw std::invalid_argument("basis and calibration cover different registers");
  }
  entries_ = DiagonalObservable(terms, basis).entries();
  for (const auto& mk : cal.matrices) {
    const Eigen::Matrix2d inv_t = invert_readout(mk).transpose();
    const Eigen::Vector2d ones = inv_t * Eigen::Vector2d(1.0, 1.0);
    const Eigen::Vector2d signs = inv_t * Eigen::Vector2d(1.0, -1.0);
    off_support_.push_back({ones(0), ones(1)});
    on_support_.push_back({signs(0), signs(1)});
  }
}

double MitigatedObservable::operator()(std::uint64_t bits) const {
  double total = 0.0;
  for (const auto& e : entries_) {
    double product = e.coeff;
    for (std::size_t k = 0; k < n_qubits_; ++k) {
      const int b = static_cast<int>((bits >> k) & 1U);
      product *= ((e.mask >> k) & 1U) ? on_support_[k][b] : off_support_[k][b];
    }
    total += product;
  }
  return total;
}

EnergyEstimate mitigated_energy(const QubitHamiltonian& h,
                                const std::vector<CommutingGroup>& groups,
                                const std::vector<CountsTable>& counts,
                                const CalibrationSet& cal) {
  if (counts.size() != groups.size()) {
    throw std::invalid_argument("expected counts for " + std::to_string(groups.size()) +
                                " groups, got " + std::to_string(counts.size()));
  }
  if (cal.n_qubits != h.n_qubits) {
    throw std::invalid_argument("calibration does not match the Hamiltonian register");
  }
  EnergyEstimate estimate;
  estimate.value = h.identity_offset;
  double variance = 0.0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const CountsTable& table = counts[g];
    if (!(table.basis == groups[g].basis)) {
      throw std::invalid_argument("counts for group " + std::to_string(g) +
                                  " were taken in the wrong basis");
    }
    const QuasiDistribution q = apply_mitigation(table, cal);
    const DiagonalObservable observable(groups[g].terms, table.basis);
    const double value = expectation(q, observable);

    const MitigatedObservable per_shot(groups[g].terms, table.basis, cal);
    const double m = static_cast<double>(table.shots);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (const auto& [bits, n] : table.counts) {
      const double v = per_shot(bits_to_index(bits));
      sum += static_cast<double>(n) * v;
      sum_sq += static_cast<double>(n) * v * v;
    }
    const double mean = sum / m;
    double sample_var = 0.0;
    if (table.shots > 1) {
      sample_var = std::max(0.0, (sum_sq - m * mean * mean) / (m - 1.0));
    }
    GroupContribution c{g, value, sample_var / m, table.shots};
    estimate.value += c.value;
    variance += c.variance;
    estimate.per_group.push_back(c);
  }
  estimate.std_error = std::sqrt(variance);
  return estimate;
}

// Serialization

void write_calibration(std::ostream& out, const CalibrationSet& cal) {
  out << "# qubits " << cal.n_qubits << '\n';
  out << "# shots " << cal.shots << '\n';
  out << "# seed " << cal.seed << '\n';
  for (std::size_t k = 0; k < cal.n_qubits; ++k) {
    const auto r = cal.rates(k);
    out << k << ' ' << format_exact(r.p10) << ' ' << format_exact(r.p01) << '\n';
  }
}

CalibrationSet read_calibration(std::istream& in) {
  std::size_t declared = 0;
  bool have_qubits = false;
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;
  std::vector<ReadoutError> rates;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    if (line[0] == '#') {
      std::string hash, key;
      fields >> hash >> key;
      if (key == "qubits") {
        fields >> declared;
        have_qubits = true;
      } else if (key == "shots") {
        fields >> shots;
      } else if (key == "seed") {
        fields >> seed;
      }
      continue;
    }
    std::size_t k = 0;
    ReadoutError r;
    if (!(fields >> k >> r.p10 >> r.p01)) {
      throw std::invalid_argument("malformed calibration line: " + line);
    }
    if (k != rates.size()) {
      throw std::invalid_argument("calibration qubits must be listed in order");
    }
    rates.push_back(r);
  }
  if (!have_qubits || rates.size() != declared) {
    throw std::invalid_argument("calibration file does not list every declared qubit");
  }
  CalibrationSet cal = CalibrationSet::from_rates(rates, shots, seed);
  cal.circuits = 2;
  return cal;
}

}  // namespace fhbench
