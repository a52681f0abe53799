#include "fhbench/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace fhbench {

namespace {

constexpr std::size_t kMaxRegisterQubits = 62;

void check_probability(double p, const char* what) {
  if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
    throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
  }
}

// Flips outcome bits in place according to per-qubit readout errors.
std::uint64_t apply_readout(std::uint64_t bits, std::size_t n_qubits,
                            const NoiseModel& noise, Rng& rng) {
  if (!noise.has_readout_noise()) return bits;
  for (std::size_t k = 0; k < n_qubits; ++k) {
    const ReadoutError e = noise.readout_at(k);
    const bool one = (bits >> k) & 1U;
    if (rng.bernoulli(one ? e.p01 : e.p10)) bits ^= 1ULL << k;
  }
  return bits;
}

void merge_into(CountsTable& table,
                const std::unordered_map<std::uint64_t, std::uint64_t>& hist) {
  for (const auto& [bits, n] : hist) {
    table.counts[index_to_bits(bits, table.n_qubits)] += n;
  }
}

}  // namespace

// StateVector

StateVector::StateVector(std::size_t n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits > 30) {
    throw std::invalid_argument("statevector limited to 30 qubits");
  }
  amps_.assign(std::size_t{1} << n_qubits, Amplitude{0.0, 0.0});
  amps_[0] = 1.0;
}

void StateVector::apply(const Gate& gate) {
  const std::size_t q = gate.qubits[0];
  if (q >= n_qubits_ || (gate.kind == GateKind::CNOT && gate.qubits[1] >= n_qubits_)) {
    throw std::invalid_argument("gate outside the simulated register");
  }
  const std::size_t bit = std::size_t{1} << q;
  const std::size_t dim = amps_.size();

  switch (gate.kind) {
    case GateKind::X:
      for (std::size_t i = 0; i < dim; ++i) {
        if (!(i & bit)) std::swap(amps_[i], amps_[i | bit]);
      }
      break;
    case GateKind::Y: {
      const Amplitude i1(0.0, 1.0);
      for (std::size_t i = 0; i < dim; ++i) {
        if (i & bit) continue;
        const Amplitude a0 = amps_[i];
        const Amplitude a1 = amps_[i | bit];
        amps_[i] = -i1 * a1;
        amps_[i | bit] = i1 * a0;
      }
      break;
    }
    case GateKind::Z:
      for (std::size_t i = 0; i < dim; ++i) {
        if (i & bit) amps_[i] = -amps_[i];
      }
      break;
    case GateKind::CNOT: {
      const std::size_t cbit = bit;
      const std::size_t tbit = std::size_t{1} << gate.qubits[1];
      for (std::size_t i = 0; i < dim; ++i) {
        if ((i & cbit) && !(i & tbit)) std::swap(amps_[i], amps_[i | tbit]);
      }
      break;
    }
    case GateKind::RY:
    case GateKind::RY_DAG: {
      const double angle = gate.kind == GateKind::RY ? gate.angle : -gate.angle;
      const double c = std::cos(angle / 2.0);
      const double s = std::sin(angle / 2.0);
      for (std::size_t i = 0; i < dim; ++i) {
        if (i & bit) continue;
        const Amplitude a0 = amps_[i];
        const Amplitude a1 = amps_[i | bit];
        amps_[i] = c * a0 - s * a1;
        amps_[i | bit] = s * a0 + c * a1;
      }
      break;
    }
  }
}

void StateVector::apply_hadamard(std::size_t q) {
  const std::size_t bit = std::size_t{1} << q;
  const double r = std::numbers::sqrt2 / 2.0;
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    if (i & bit) continue;
    const Amplitude a0 = amps_[i];
    const Amplitude a1 = amps_[i | bit];
    amps_[i] = r * (a0 + a1);
    amps_[i | bit] = r * (a0 - a1);
  }
}

void StateVector::apply_s_dagger(std::size_t q) {
  const std::size_t bit = std::size_t{1} << q;
  const Amplitude minus_i(0.0, -1.0);
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    if (i & bit) amps_[i] *= minus_i;
  }
}

double StateVector::norm() const {
  double sum = 0.0;
  for (const auto& a : amps_) sum += std::norm(a);
  return std::sqrt(sum);
}

// NoiseModel

NoiseModel NoiseModel::noiseless(std::uint64_t seed) {
  NoiseModel m;
  m.seed = seed;
  return m;
}

NoiseModel NoiseModel::uniform(std::size_t n_qubits, double p10, double p01,
                               double p2, std::uint64_t seed) {
  NoiseModel m;
  m.readout.assign(n_qubits, ReadoutError{p10, p01});
  m.cnot_depolarizing = p2;
  m.seed = seed;
  m.validate();
  return m;
}

ReadoutError NoiseModel::readout_at(std::size_t qubit) const {
  if (readout.empty()) return {};
  if (qubit >= readout.size()) {
    throw std::out_of_range("noise model has no readout entry for qubit " +
                            std::to_string(qubit));
  }
  return readout[qubit];
}

bool NoiseModel::has_readout_noise() const {
  return std::any_of(readout.begin(), readout.end(), [](const ReadoutError& e) {
    return e.p10 != 0.0 || e.p01 != 0.0;
  });
}

NoiseModel NoiseModel::truncated(std::size_t n_qubits) const {
  NoiseModel m = *this;
  if (!m.readout.empty()) {
    if (m.readout.size() < n_qubits) {
      throw std::out_of_range("noise model covers " +
                              std::to_string(m.readout.size()) + " qubits, need " +
                              std::to_string(n_qubits));
    }
    m.readout.resize(n_qubits);
  }
  return m;
}

void NoiseModel::validate() const {
  for (const auto& e : readout) {
    check_probability(e.p10, "p10");
    check_probability(e.p01, "p01");
  }
  check_probability(cnot_depolarizing, "cnot_depolarizing");
  if (trajectories == 0) throw std::invalid_argument("trajectories must be >= 1");
}

std::uint64_t CountsTable::total() const {
  std::uint64_t sum = 0;
  for (const auto& [bits, n] : counts) sum += n;
  return sum;
}

// Simulation

StateVector run_statevector(const Circuit& circuit) {
  if (circuit.n_qubits % 2 != 0) {
    throw std::invalid_argument("circuit register must have 2L qubits");
  }
  const std::size_t top = circuit.n_qubits / 2;
  circuit.validate(top);
  StateVector state(top);
  for (const Gate& g : circuit.gates) state.apply(g);
  return state;
}

StateVector rotate_to_basis(StateVector state, const MeasurementBasis& basis) {
  const std::size_t top = state.n_qubits();
  if (basis.size() < top) {
    throw std::invalid_argument("basis shorter than the simulated register");
  }
  for (std::size_t q = 0; q < top; ++q) {
    switch (basis[q]) {
      case PauliOp::X:
        state.apply_hadamard(q);
        break;
      case PauliOp::Y:
        state.apply_s_dagger(q);
        state.apply_hadamard(q);
        break;
      default:
        break;
    }
  }
  return state;
}

CountsTable sample_counts(const StateVector& state, const MeasurementBasis& basis,
                          std::uint64_t shots, const NoiseModel& noise,
                          std::uint64_t seed) {
  if (shots < 1) throw std::invalid_argument("shots must be >= 1");
  const std::size_t n = basis.size();
  const std::size_t top = state.n_qubits();
  if (n < top || n > kMaxRegisterQubits) {
    throw std::invalid_argument("basis size does not fit the register");
  }

  const StateVector rotated = rotate_to_basis(state, basis);
  std::vector<double> cumulative(rotated.dimension());
  double acc = 0.0;
  for (std::size_t i = 0; i < rotated.dimension(); ++i) {
    acc += std::norm(rotated[i]);
    cumulative[i] = acc;
  }

  std::uint64_t coin_mask = 0;
  for (std::size_t k = top; k < n; ++k) {
    if (basis[k] != PauliOp::Z) coin_mask |= 1ULL << k;
  }

  Rng rng(seed);
  std::unordered_map<std::uint64_t, std::uint64_t> hist;
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    std::uint64_t bits = static_cast<std::uint64_t>(
        std::min<std::ptrdiff_t>(it - cumulative.begin(),
                                 static_cast<std::ptrdiff_t>(cumulative.size()) - 1));
    for (std::size_t k = top; k < n; ++k) {
      if ((coin_mask >> k) & 1U) bits |= (rng.next() >> 63) << k;
    }
    bits = apply_readout(bits, n, noise, rng);
    ++hist[bits];
  }

  CountsTable table;
  table.n_qubits = n;
  table.basis = basis;
  table.shots = shots;
  table.seed = seed;
  merge_into(table, hist);
  return table;
}

Circuit apply_gate_noise(const Circuit& circuit, const NoiseModel& noise, Rng& rng) {
  const double p2 = noise.cnot_depolarizing;
  check_probability(p2, "cnot_depolarizing");
  if (p2 == 0.0) return circuit;
  Circuit out = circuit;
  out.gates.clear();
  for (const Gate& g : circuit.gates) {
    out.gates.push_back(g);
    if (g.kind != GateKind::CNOT || !rng.bernoulli(p2)) continue;
    const std::uint64_t pauli = rng.below(15) + 1;  // 1..15, never II
    const std::size_t ops[2] = {pauli % 4, pauli / 4};
    for (int i = 0; i < 2; ++i) {
      const std::size_t q = g.qubits[i];
      switch (ops[i]) {
        case 1: out.gates.push_back(Gate::x(q)); break;
        case 2: out.gates.push_back(Gate::y(q)); break;
        case 3: out.gates.push_back(Gate::z(q)); break;
        default: break;
      }
    }
  }
  return out;
}

CountsTable measure_circuit(const Circuit& circuit, const MeasurementBasis& basis,
                            std::uint64_t shots, const NoiseModel& noise,
                            std::uint64_t stream_seed) {
  if (shots < 1) throw std::invalid_argument("shots must be >= 1");
  if (basis.size() != circuit.n_qubits) {
    throw std::invalid_argument("basis does not cover every circuit qubit");
  }
  noise.validate();
  if (noise.cnot_depolarizing == 0.0) {
    auto table = sample_counts(run_statevector(circuit), basis, shots, noise,
                               derive_seed(stream_seed, {0}));
    table.seed = stream_seed;
    return table;
  }

  CountsTable merged;
  merged.n_qubits = basis.size();
  merged.basis = basis;
  merged.shots = shots;
  merged.seed = stream_seed;
  const std::uint64_t t = noise.trajectories;
  for (std::uint64_t j = 0; j < t; ++j) {
    const std::uint64_t share = shots / t + (j < shots % t ? 1 : 0);
    if (share == 0) continue;
    const std::uint64_t seed = derive_seed(stream_seed, {j});
    Rng gate_rng(derive_seed(seed, {0}));
    const Circuit realized = apply_gate_noise(circuit, noise, gate_rng);
    const auto part = sample_counts(run_statevector(realized), basis, share, noise,
                                    derive_seed(seed, {1}));
    for (const auto& [bits, n] : part.counts) merged.counts[bits] += n;
  }
  return merged;
}

CountsTable sample_prepared(const std::vector<bool>& bits, std::uint64_t shots,
                            const NoiseModel& noise, std::uint64_t seed) {
  if (shots < 1) throw std::invalid_argument("shots must be >= 1");
  const std::size_t n = bits.size();
  if (n == 0 || n > kMaxRegisterQubits) {
    throw std::invalid_argument("prepared register size out of range");
  }
  std::uint64_t ideal = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (bits[k]) ideal |= 1ULL << k;
  }
  Rng rng(seed);
  std::unordered_map<std::uint64_t, std::uint64_t> hist;
  for (std::uint64_t s = 0; s < shots; ++s) ++hist[apply_readout(ideal, n, noise, rng)];

  CountsTable table;
  table.n_qubits = n;
  table.basis = MeasurementBasis::all_z(n);
  table.shots = shots;
  table.seed = seed;
  merge_into(table, hist);
  return table;
}

// Serialization

void write_counts(std::ostream& out, const CountsTable& counts) {
  out << "# basis " << counts.basis.to_string() << '\n';
  out << "# shots " << counts.shots << '\n';
  out << "# seed " << counts.seed << '\n';
  for (const auto& [bits, n] : counts.counts) out << bits << ' ' << n << '\n';
}

CountsTable read_counts(std::istream& in) {
  CountsTable table;
  bool have_basis = false;
  bool have_shots = false;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    if (line[0] == '#') {
      std::string hash, key;
      fields >> hash >> key;
      if (key == "basis") {
        std::string b;
        fields >> b;
        table.basis = MeasurementBasis::parse(b);
        table.n_qubits = table.basis.size();
        have_basis = true;
      } else if (key == "shots") {
        fields >> table.shots;
        have_shots = true;
      } else if (key == "seed") {
        fields >> table.seed;
      }
      continue;
    }
    std::string bits;
    std::uint64_t n = 0;
    if (!(fields >> bits >> n)) {
      throw std::invalid_argument("malformed counts line: " + line);
    }
    if (bits.find_first_not_of("01") != std::string::npos) {
      throw std::invalid_argument("bitstring must contain only 0 and 1: " + bits);
    }
    if (!have_basis) throw std::invalid_argument("counts file lacks a basis header");
    if (bits.size() != table.n_qubits) {
      throw std::invalid_argument("bitstring length does not match basis");
    }
    table.counts[bits] += n;
  }
  if (!have_basis || !have_shots) {
    throw std::invalid_argument("counts file needs '# basis' and '# shots' headers");
  }
  if (table.total() != table.shots) {
    throw std::invalid_argument("counts do not sum to the declared shots");
  }
  return table;
}

std::uint64_t bits_to_index(const std::string& bits) {
  if (bits.size() > 64) throw std::invalid_argument("bitstring longer than 64");
  std::uint64_t index = 0;
  for (std::size_t k = 0; k < bits.size(); ++k) {
    if (bits[k] == '1') {
      index |= 1ULL << k;
    } else if (bits[k] != '0') {
      throw std::invalid_argument("bitstring must contain only 0 and 1");
    }
  }
  return index;
}

std::string index_to_bits(std::uint64_t index, std::size_t n_qubits) {
  std::string s(n_qubits, '0');
  for (std::size_t k = 0; k < n_qubits; ++k) {
    if ((index >> k) & 1U) s[k] = '1';
  }
  return s;
}

}  // namespace fhbench
