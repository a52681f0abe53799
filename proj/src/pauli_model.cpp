#include "fhbench/pauli_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "fhbench/format.hpp"

namespace fhbench {

namespace {

constexpr double kPruneTolerance = 1e-12;

void require_length(std::size_t length) {
  if (length < 2) {
    throw std::invalid_argument("chain length must be at least 2, got " +
                                std::to_string(length));
  }
}

}  // namespace

char to_char(PauliOp op) {
  switch (op) {
    case PauliOp::I: return 'I';
    case PauliOp::X: return 'X';
    case PauliOp::Y: return 'Y';
    case PauliOp::Z: return 'Z';
  }
  return '?';
}

PauliOp pauli_from_char(char c) {
  switch (c) {
    case 'I': return PauliOp::I;
    case 'X': return PauliOp::X;
    case 'Y': return PauliOp::Y;
    case 'Z': return PauliOp::Z;
    default:
      throw std::invalid_argument(std::string("not a Pauli label: '") + c + "'");
  }
}

// PauliString

PauliString::PauliString(std::size_t n_qubits) : ops_(n_qubits, PauliOp::I) {}

PauliString::PauliString(std::vector<PauliOp> ops) : ops_(std::move(ops)) {}

PauliString PauliString::parse(std::string_view text) {
  std::vector<PauliOp> ops;
  ops.reserve(text.size());
  for (char c : text) ops.push_back(pauli_from_char(c));
  return PauliString(std::move(ops));
}

bool PauliString::is_identity() const {
  return std::all_of(ops_.begin(), ops_.end(),
                     [](PauliOp op) { return op == PauliOp::I; });
}

bool PauliString::is_diagonal() const {
  return std::all_of(ops_.begin(), ops_.end(), [](PauliOp op) {
    return op == PauliOp::I || op == PauliOp::Z;
  });
}

std::vector<std::size_t> PauliString::support() const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < ops_.size(); ++k) {
    if (ops_[k] != PauliOp::I) out.push_back(k);
  }
  return out;
}

std::uint64_t PauliString::x_mask() const {
  std::uint64_t mask = 0;
  for (std::size_t k = 0; k < ops_.size(); ++k) {
    if (ops_[k] == PauliOp::X || ops_[k] == PauliOp::Y) mask |= 1ULL << k;
  }
  return mask;
}

std::uint64_t PauliString::z_mask() const {
  std::uint64_t mask = 0;
  for (std::size_t k = 0; k < ops_.size(); ++k) {
    if (ops_[k] == PauliOp::Z || ops_[k] == PauliOp::Y) mask |= 1ULL << k;
  }
  return mask;
}

std::uint64_t PauliString::support_mask() const { return x_mask() | z_mask(); }

std::size_t PauliString::y_count() const {
  return static_cast<std::size_t>(
      std::count(ops_.begin(), ops_.end(), PauliOp::Y));
}

std::string PauliString::to_string() const {
  std::string s;
  s.reserve(ops_.size());
  for (PauliOp op : ops_) s.push_back(to_char(op));
  return s;
}

// QubitHamiltonian

QubitHamiltonian QubitHamiltonian::from_terms(std::size_t n_qubits,
                                              const std::vector<PauliTerm>& raw) {
  QubitHamiltonian h;
  h.n_qubits = n_qubits;
  std::map<PauliString, double> merged;
  for (const auto& term : raw) {
    if (term.string.size() != n_qubits) {
      throw std::invalid_argument("Pauli string '" + term.string.to_string() +
                                  "' does not have " +
                                  std::to_string(n_qubits) + " qubits");
    }
    if (!std::isfinite(term.coeff)) {
      throw std::invalid_argument("non-finite coefficient on '" +
                                  term.string.to_string() + "'");
    }
    if (term.string.is_identity()) {
      h.identity_offset += term.coeff;
    } else {
      merged[term.string] += term.coeff;
    }
  }
  if (std::abs(h.identity_offset) < kPruneTolerance) h.identity_offset = 0.0;
  for (const auto& [string, coeff] : merged) {
    if (std::abs(coeff) >= kPruneTolerance) h.terms.push_back({string, coeff});
  }
  return h;
}

// MeasurementBasis

MeasurementBasis::MeasurementBasis(std::vector<PauliOp> axes)
    : axes_(std::move(axes)) {
  for (PauliOp a : axes_) {
    if (a == PauliOp::I) {
      throw std::invalid_argument("measurement axis must be X, Y or Z");
    }
  }
}

MeasurementBasis MeasurementBasis::all_z(std::size_t n_qubits) {
  return MeasurementBasis(std::vector<PauliOp>(n_qubits, PauliOp::Z));
}

MeasurementBasis MeasurementBasis::parse(std::string_view text) {
  std::vector<PauliOp> axes;
  for (char c : text) axes.push_back(pauli_from_char(c));
  return MeasurementBasis(std::move(axes));
}

bool MeasurementBasis::measures(const PauliString& s) const {
  if (s.size() != axes_.size()) return false;
  for (std::size_t k = 0; k < axes_.size(); ++k) {
    if (s[k] != PauliOp::I && s[k] != axes_[k]) return false;
  }
  return true;
}

std::string MeasurementBasis::to_string() const {
  std::string s;
  for (PauliOp a : axes_) s.push_back(to_char(a));
  return s;
}

std::string_view to_string(GroupKind kind) {
  switch (kind) {
    case GroupKind::Diagonal: return "diagonal";
    case GroupKind::XXEven: return "xx-even";
    case GroupKind::XXOdd: return "xx-odd";
    case GroupKind::YYEven: return "yy-even";
    case GroupKind::YYOdd: return "yy-odd";
  }
  return "?";
}

// Model construction

QubitHamiltonian build_hamiltonian(std::size_t length, double t, double u) {
  require_length(length);
  if (!std::isfinite(t) || !std::isfinite(u)) {
    throw std::invalid_argument("hopping t and interaction U must be finite");
  }
  const std::size_t n = 2 * length;
  std::vector<PauliTerm> raw;

  auto single = [n](std::initializer_list<std::pair<std::size_t, PauliOp>> ops) {
    PauliString s(n);
    for (auto [k, op] : ops) s.set(k, op);
    return s;
  };

  // -t (a_i^dag a_j + h.c.) -> -(t/2)(X_i X_j + Y_i Y_j) for adjacent modes.
  for (std::size_t block : {std::size_t{0}, length}) {
    for (std::size_t i = 0; i + 1 < length; ++i) {
      const std::size_t a = block + i;
      const std::size_t b = a + 1;
      raw.push_back({single({{a, PauliOp::X}, {b, PauliOp::X}}), -t / 2.0});
      raw.push_back({single({{a, PauliOp::Y}, {b, PauliOp::Y}}), -t / 2.0});
    }
  }

  // U n_up n_down -> (U/4)(I - Z_up)(I - Z_down).
  for (std::size_t i = 0; i < length; ++i) {
    const std::size_t up = i;
    const std::size_t down = i + length;
    raw.push_back({PauliString(n), u / 4.0});
    raw.push_back({single({{up, PauliOp::Z}}), -u / 4.0});
    raw.push_back({single({{down, PauliOp::Z}}), -u / 4.0});
    raw.push_back({single({{up, PauliOp::Z}, {down, PauliOp::Z}}), u / 4.0});
  }

  return QubitHamiltonian::from_terms(n, raw);
}

double exact_gs_energy(std::size_t length) {
  require_length(length);
  const double l = static_cast<double>(length);
  return 2.0 * std::cos(l * std::numbers::pi / (l + 1.0));
}

SingleParticleOracle single_particle_oracle(std::size_t length, double t) {
  require_length(length);
  const auto n = static_cast<Eigen::Index>(length);
  SingleParticleOracle oracle;
  oracle.length = length;
  oracle.hopping = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    oracle.hopping(i, i + 1) = -t;
    oracle.hopping(i + 1, i) = -t;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(oracle.hopping);
  oracle.ground_energy = solver.eigenvalues()(0);
  oracle.ground_vector = solver.eigenvectors().col(0);
  if (oracle.ground_vector.sum() < 0.0) oracle.ground_vector *= -1.0;
  oracle.ground_vector.normalize();
  return oracle;
}

std::vector<CommutingGroup> group_commuting(const QubitHamiltonian& h) {
  const std::size_t n = h.n_qubits;
  const std::size_t length = h.chain_length();
  if (n < 4 || n % 2 != 0) {
    throw std::invalid_argument("expected a chain Hamiltonian on 2L qubits");
  }

  std::vector<CommutingGroup> groups(5);
  const GroupKind kinds[] = {GroupKind::Diagonal, GroupKind::XXEven,
                             GroupKind::XXOdd, GroupKind::YYEven,
                             GroupKind::YYOdd};
  for (std::size_t g = 0; g < groups.size(); ++g) {
    groups[g].kind = kinds[g];
    groups[g].basis = MeasurementBasis::all_z(n);
  }
  groups[0].identity_offset = h.identity_offset;

  // Bond index of the pair (q, q+1), or -1 if it straddles the spin blocks.
  auto bond_index = [length](std::size_t q) -> long {
    if (q + 1 < length) return static_cast<long>(q);
    if (q >= length && q + 1 < 2 * length) {
      return static_cast<long>(length - 1 + (q - length));
    }
    return -1;
  };

  for (const auto& term : h.terms) {
    if (term.string.is_diagonal()) {
      groups[0].terms.push_back(term);
      continue;
    }
    const auto support = term.string.support();
    bool placed = false;
    if (support.size() == 2 && support[1] == support[0] + 1) {
      const PauliOp a = term.string[support[0]];
      const PauliOp b = term.string[support[1]];
      const long bond = bond_index(support[0]);
      if (bond >= 0 && a == b && (a == PauliOp::X || a == PauliOp::Y)) {
        const std::size_t g = (a == PauliOp::X ? 1 : 3) + (bond % 2);
        std::vector<PauliOp> axes = groups[g].basis.axes();
        axes[support[0]] = a;
        axes[support[1]] = a;
        groups[g].basis = MeasurementBasis(std::move(axes));
        groups[g].terms.push_back(term);
        placed = true;
      }
    }
    if (!placed) {
      throw std::logic_error("term " + term.string.to_string() +
                             " fits no measurement group");
    }
  }

  std::vector<CommutingGroup> out;
  for (auto& g : groups) {
    const bool keep = !g.terms.empty() ||
                      (g.kind == GroupKind::Diagonal && g.identity_offset != 0.0);
    if (keep) out.push_back(std::move(g));
  }
  return out;
}

Eigen::MatrixXd dense_matrix(const QubitHamiltonian& h) {
  const std::size_t n = h.n_qubits;
  if (n > kMaxDenseQubits) {
    throw std::invalid_argument("dense_matrix supports at most 16 qubits, got " +
                                std::to_string(n));
  }
  using Complex = std::complex<double>;
  using CMatrix = Eigen::MatrixXcd;
  const Complex i1(0.0, 1.0);

  auto single = [&](PauliOp op) {
    CMatrix m(2, 2);
    switch (op) {
      case PauliOp::I: m << 1, 0, 0, 1; break;
      case PauliOp::X: m << 0, 1, 1, 0; break;
      case PauliOp::Y: m << 0, -i1, i1, 0; break;
      case PauliOp::Z: m << 1, 0, 0, -1; break;
    }
    return m;
  };
  auto kron = [](const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
      for (Eigen::Index c = 0; c < a.cols(); ++c) {
        out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
      }
    }
    return out;
  };

  const auto dim = static_cast<Eigen::Index>(1ULL << n);
  CMatrix total = CMatrix::Identity(dim, dim) * h.identity_offset;
  for (const auto& term : h.terms) {
    // Qubit N-1 is the most significant tensor factor.
    CMatrix m = single(term.string[n - 1]);
    for (std::size_t k = n - 1; k-- > 0;) m = kron(m, single(term.string[k]));
    total += term.coeff * m;
  }
  if (total.imag().cwiseAbs().maxCoeff() > 1e-12) {
    throw std::logic_error("Hamiltonian has imaginary matrix elements");
  }
  return total.real();
}

void write_hamiltonian(std::ostream& out, const QubitHamiltonian& h) {
  out << format_exact(h.identity_offset) << ' '
      << std::string(h.n_qubits, 'I') << '\n';
  for (const auto& term : h.terms) {
    out << format_exact(term.coeff) << ' ' << term.string.to_string() << '\n';
  }
}

QubitHamiltonian read_hamiltonian(std::istream& in) {
  std::vector<PauliTerm> raw;
  std::size_t n = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    double coeff = 0.0;
    std::string label;
    if (!(fields >> coeff >> label)) {
      throw std::invalid_argument("malformed Hamiltonian line " +
                                  std::to_string(line_no) + ": " + line);
    }
    if (n == 0) n = label.size();
    raw.push_back({PauliString::parse(label), coeff});
  }
  if (n == 0) throw std::invalid_argument("empty Hamiltonian file");
  return QubitHamiltonian::from_terms(n, raw);
}

}  // namespace fhbench
