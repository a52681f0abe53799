// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <sys/resource.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "fhbench/ansatz.hpp"
#include "fhbench/bench.hpp"
#include "fhbench/cli.hpp"
#include "fhbench/estimator.hpp"
#include "fhbench/mitigation.hpp"
#include "fhbench/vqe.hpp"
#include "support/oracles.hpp"

using namespace fhbench;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool condition, const std::string& what) {
    if (!condition && ok) {
      ok = false;
      detail = what;
    }
  }
};

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.ok = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (o.ok && elapsed >= budget_s) {
    o.ok = false;
    o.detail = "runtime budget exceeded";
  }
  if (!o.ok) ++failures;
  std::printf("%s  %2d  %-34s %7.2fs / %gs  %s\n", o.ok ? "PASS" : "FAIL", id, name, elapsed,
              budget_s, o.detail.c_str());
  std::fflush(stdout);
}

double peak_rss_mb() {
  rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  return static_cast<double>(usage.ru_maxrss) / 1024.0;
}

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

Outcome exact_energy() {
  Outcome o;
  double worst_cli = 0.0;
  double worst_oracle = 0.0;
  for (std::size_t length = 2; length <= 24; ++length) {
    const double l = static_cast<double>(length);
    const double closed = 2 * std::cos(l * std::numbers::pi / (l + 1));
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli({"exact", "--length", std::to_string(length)}, out, err);
    o.require(code == 0, "exact subcommand failed at L=" + std::to_string(length));
    worst_cli = std::max(worst_cli, std::abs(std::stod(out.str()) - closed));
    worst_oracle = std::max(worst_oracle, std::abs(single_particle_oracle(length).ground_energy -
                                                   exact_gs_energy(length)));
  }
  o.require(worst_cli < 1e-12, "printed value differs from closed form");
  o.require(worst_oracle < 1e-12, "tridiagonal oracle disagrees");
  o.require(std::abs(exact_gs_energy(2) + 1) < 1e-12, "L=2 spot value");
  o.require(std::abs(exact_gs_energy(3) + std::numbers::sqrt2) < 1e-12, "L=3 spot value");
  std::ostringstream out;
  std::ostringstream err;
  o.require(run_cli({"exact", "--length", "1"}, out, err) == kExitUsage, "L=1 not a usage error");
  if (o.ok) o.detail = fmt("max |cli - closed| %.1e, max |oracle - closed| %.1e", worst_cli, worst_oracle);
  return o;
}

Outcome preoptimization() {
  Outcome o;
  double worst = 0.0;
  double at12 = 0.0;
  for (std::size_t length = 2; length <= 12; ++length) {
    const auto r = preoptimize(length);
    worst = std::max(worst, std::abs(r.gap));
    if (length == 12) at12 = r.gap;
    o.require(std::abs(r.gap) <= 1e-8, "gap above 1e-8 at L=" + std::to_string(length));
  }
  if (o.ok) o.detail = fmt("max gap %.2e, L=12 gap %.2e", worst, at12);
  return o;
}

Outcome gate_scaling() {
  Outcome o;
  for (std::size_t length = 2; length <= 24; ++length) {
    const std::vector<double> angles(length - 1, 0.1);
    const auto c = build_ladder_circuit(length, angles);
    const std::string l = std::to_string(length);
    o.require(c.count(GateKind::CNOT) == 2 * length - 3, "CNOT count at L=" + l);
    o.require(c.parameters.size() == length - 1, "parameter count at L=" + l);
    o.require(gate_counts(length) == GateCounts{2 * length - 3, length - 1}, "gate_counts at L=" + l);
  }
  o.require(gate_counts(4).parameters == 3, "L=4 parameters");
  if (o.ok) o.detail = "2L-3 CNOTs, L-1 parameters for L=2..24";
  return o;
}

Outcome grouping() {
  Outcome o;
  for (std::size_t length = 2; length <= 16; ++length) {
    const auto h = build_hamiltonian(length, 1.0, 2.0);
    const auto groups = group_commuting(h);
    o.require(groups.size() <= 5, "more than 5 groups at L=" + std::to_string(length));
    std::vector<PauliTerm> all;
    double offset = 0.0;
    for (const auto& g : groups) {
      offset += g.identity_offset;
      for (const auto& t : g.terms) {
        o.require(g.basis.measures(t.string), "term outside its group's basis");
        all.push_back(t);
      }
    }
    const auto rebuilt = QubitHamiltonian::from_terms(h.n_qubits, all);
    auto sorted = [](std::vector<PauliTerm> v) {
      std::sort(v.begin(), v.end(),
                [](const PauliTerm& a, const PauliTerm& b) { return a.string < b.string; });
      return v;
    };
    o.require(all.size() == h.terms.size() && sorted(rebuilt.terms) == sorted(h.terms) &&
                  offset == h.identity_offset,
              "partition does not reconstruct H at L=" + std::to_string(length));
    if (length <= 4) {
      Eigen::MatrixXd sum = Eigen::MatrixXd::Identity(1 << h.n_qubits, 1 << h.n_qubits) * offset;
      for (const auto& g : groups) {
        QubitHamiltonian part;
        part.n_qubits = h.n_qubits;
        part.terms = g.terms;
        sum += dense_matrix(part);
      }
      o.require((sum - dense_matrix(h)).cwiseAbs().maxCoeff() < 1e-12, "dense partition sum");
    }
  }
  const auto g2 = group_commuting(build_hamiltonian(2, 1.0, 2.0));
  std::size_t non_empty = 0;
  for (const auto& g : g2) non_empty += g.terms.empty() ? 0 : 1;
  o.require(g2.size() == 5 && non_empty == 5, "L=2 does not give exactly 5 non-empty groups");
  if (o.ok) o.detail = "<=5 groups for L=2..16, exactly 5 at L=2";
  return o;
}

Outcome span_property() {
  Outcome o;
  std::mt19937_64 rng(20240101);
  std::uniform_real_distribution<double> d(1e-6, 1.0);
  double worst = 1.0;
  for (std::size_t length = 2; length <= 8; ++length) {
    for (int rep = 0; rep < 100; ++rep) {
      std::vector<double> target(length);
      double norm = 0.0;
      for (double& v : target) {
        v = d(rng);
        norm += v * v;
      }
      for (double& v : target) v /= std::sqrt(norm);
      norm = 1.0;
      const auto state = run_statevector(build_ladder_circuit(length, solve_parameters(target)));
      std::complex<double> overlap = 0.0;
      for (std::size_t k = 0; k < length; ++k) overlap += target[k] * state[std::size_t{1} << k];
      worst = std::min(worst, std::norm(overlap) / norm);
    }
  }
  o.require(worst >= 1 - 1e-10, "fidelity below 1 - 1e-10");
  o.detail = fmt("min fidelity 1 - %.1e over 700 targets", 1 - worst);
  return o;
}

Outcome decomposition() {
  Outcome o;
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double theta = -std::numbers::pi + 2 * std::numbers::pi * i / 49.0;
    const auto u = oracle::circuit_unitary(decompose_a_full(theta), 2);
    worst = std::max(worst, oracle::phase_distance(u, a_gate_matrix(theta).cast<std::complex<double>>()));
  }
  o.require(worst < 1e-10, "fragment differs from the A gate");
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> d(-std::numbers::pi, std::numbers::pi);
  double worst_ladder = 0.0;
  for (std::size_t length = 2; length <= 5; ++length) {
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<double> angles(length - 1);
      for (double& a : angles) a = d(rng);
      const auto a = oracle::simulate(build_ladder_circuit(length, angles).gates, length);
      const auto b = oracle::simulate(build_unsimplified_ladder_circuit(length, angles).gates, length);
      worst_ladder = std::max(worst_ladder, (a - b).cwiseAbs().maxCoeff());
    }
  }
  o.require(worst_ladder < 1e-10, "simplified ladder differs from full ladder");
  o.detail = fmt("gate grid max dev %.1e, ladder max dev %.1e", worst, worst_ladder);
  return o;
}

EnergyEstimate measure_ground(std::size_t length, std::uint64_t shots, const NoiseModel& noise,
                              std::uint64_t seed, const CalibrationSet* cal = nullptr) {
  const auto h = build_hamiltonian(length, 1.0, 2.0);
  const auto groups = group_commuting(h);
  const auto c = build_ladder_circuit(length, preoptimize(length).parameters);
  std::vector<CountsTable> counts;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    counts.push_back(measure_circuit(c, groups[g].basis, shots, noise, derive_seed(seed, {g})));
  }
  return cal ? mitigated_energy(h, groups, counts, *cal) : energy_from_group_counts(h, groups, counts);
}

Outcome shot_statistics() {
  Outcome o;
  double worst_sigma = 0.0;
  for (std::size_t length = 2; length <= 6; ++length) {
    const auto e = measure_ground(length, 8192, NoiseModel::noiseless(), 100 + length);
    const double z = std::abs(e.value - exact_gs_energy(length)) / e.std_error;
    worst_sigma = std::max(worst_sigma, z);
    o.require(z < 5, "shot energy beyond 5 std_error at L=" + std::to_string(length));
  }
  const double small = measure_ground(4, 2048, NoiseModel::noiseless(), 7).std_error;
  const double large = measure_ground(4, 32768, NoiseModel::noiseless(), 8).std_error;
  const double ratio = small / large;
  o.require(std::abs(ratio / 4.0 - 1.0) <= 0.2, "std_error ratio not 4 within 20%");
  o.detail = fmt("max |dE|/sigma %.2f, sigma(2048)/sigma(32768) = %.3f (ideal 4)", worst_sigma, ratio);
  return o;
}

Outcome mitigation_round_trip() {
  Outcome o;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> rate(0.0, 0.2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst_kron = 0.0;
  double worst_round = 0.0;
  for (std::size_t n = 1; n <= 6; ++n) {
    std::vector<ReadoutError> rates(n);
    for (auto& r : rates) r = {rate(rng), rate(rng)};
    const auto cal = CalibrationSet::from_rates(rates);
    std::vector<Eigen::Matrix2d> inv;
    for (const auto& m : cal.matrices) inv.push_back(invert_readout(m));
    std::vector<double> p(std::size_t{1} << n);
    double total = 0.0;
    for (double& x : p) total += (x = unit(rng));
    for (double& x : p) x /= total;
    const Eigen::VectorXd pv = Eigen::Map<Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(p.size()));
    const Eigen::VectorXd expected = oracle::kron_real(cal.matrices).inverse() * pv;
    std::vector<double> q = p;
    apply_tensor_factors(q, inv);
    for (std::size_t i = 0; i < q.size(); ++i) {
      worst_kron = std::max(worst_kron, std::abs(q[i] - expected(static_cast<Eigen::Index>(i))));
    }
    std::vector<double> r = p;
    apply_tensor_factors(r, cal.matrices);
    apply_tensor_factors(r, inv);
    for (std::size_t i = 0; i < r.size(); ++i) worst_round = std::max(worst_round, std::abs(r[i] - p[i]));
  }
  o.require(worst_kron < 1e-10, "factorized inverse differs from Kronecker inverse");
  o.require(worst_round < 1e-10, "forward/invert round trip not exact");

  int improved = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto noise = NoiseModel::uniform(6, 0.03, 0.03, 0.0, seed);
    const auto cal = calibrate(6, 8192, noise, derive_seed(seed, {tag(Stream::Calibration)}));
    const auto raw = measure_ground(3, 8192, noise, seed);
    const auto mit = measure_ground(3, 8192, noise, seed, &cal);
    const double exact = exact_gs_energy(3);
    if (std::abs(mit.value - exact) < std::abs(raw.value - exact)) ++improved;
  }
  o.require(improved == 10, "mitigation did not improve every readout-noise seed");

  auto gate_noise = NoiseModel::uniform(6, 0.0, 0.0, 0.05, 1);
  const auto cal = calibrate(6, 8192, gate_noise, 3);
  const auto raw = measure_ground(3, 8192, gate_noise, 4);
  const auto mit = measure_ground(3, 8192, gate_noise, 4, &cal);
  o.require(std::abs(mit.value - raw.value) < 3 * raw.std_error, "gate-only noise: mitigated != raw");
  if (o.ok) {
    o.detail = fmt("kron dev %.1e, round trip %.1e, 10/10 seeds improved", worst_kron, worst_round);
  }
  return o;
}

Outcome verdict_logic() {
  Outcome o;
  auto seq = [](std::vector<double> scores) {
    std::vector<LengthResult> out;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      LengthResult r;
      r.length = 2 + i;
      r.raw.score = scores[i];
      out.push_back(r);
    }
    return out;
  };
  o.require(determine_lstar(seq({5e-4, 5e-4, 2e-3, 5e-4}), 1e-3, Track::Raw) == 3, "first-failure rule");
  o.require(determine_lstar(seq({2e-3, 5e-4}), 1e-3, Track::Raw) == 0, "immediate failure gives 0");
  o.require(determine_lstar(seq({5e-4, 5e-4}), 1e-3, Track::Raw) == 3, "all pass gives L_max");

  BenchmarkConfig clean;
  clean.l_max = 6;
  const auto r = run_sweep(clean);
  o.require(r.lstar_raw == 6 && r.lstar_mitigated == 6, "noiseless sweep L* != 6");

  std::string pattern;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    BenchmarkConfig noisy;
    noisy.l_max = 6;
    noisy.readout_p10 = noisy.readout_p01 = 0.05;
    noisy.seed = seed;
    const auto n = run_sweep(noisy);
    o.require(n.lstar_mitigated > n.lstar_raw, "readout sweep: mitigated L* not above raw");
    pattern += " raw " + std::to_string(n.lstar_raw) + "/mit " + std::to_string(n.lstar_mitigated);
  }
  if (o.ok) o.detail = "noiseless L*=6; readout p=0.05 seeds:" + pattern;
  return o;
}

Outcome convergence_demo() {
  Outcome o;
  const std::vector<double> zero(2, 0.0);
  const auto t = optimize_shotbased(3, zero, 8192, NoiseModel::noiseless(1), 20);
  const double exact = -std::numbers::sqrt2;
  const auto h = build_hamiltonian(3, 1.0, 2.0);
  const double final_exact = ladder_energy(h, t.final_parameters);
  o.require(t.iterations.size() <= 21, "more than 20 iterations");
  o.require(std::abs(t.final_energy - exact) < 0.05, "measured final energy not within 0.05");
  o.require(std::abs(final_exact - exact) < 0.05, "final parameters not within 0.05");
  const auto s = optimize_shotbased(3, preoptimize(3).parameters, 8192, NoiseModel::noiseless(2), 0);
  const auto& first = s.iterations.front();
  o.require(std::abs(first.energy - exact) < 3 * first.std_error, "seeded step 0 beyond 3 std_error");
  o.detail = fmt("zero init final %.4f (exact -1.4142), seeded step-0 |dE|/sigma %.2f",
                 t.final_energy, std::abs(first.energy - exact) / first.std_error);
  return o;
}

Outcome scale_ceiling() {
  Outcome o;
  BenchmarkConfig c = BenchmarkConfig::with_default_noise();
  c.l_max = 12;
  const auto r = run_sweep(c);
  o.require(!r.results.empty() && r.results.back().length == 12, "sweep did not reach L=12");
  for (const auto& l : r.results) {
    o.require(l.mitigated.has_value(), "no mitigated value at L=" + std::to_string(l.length));
  }
  o.require(kMaxMitigationQubits < 26, "mitigation limit not below 26 qubits");
  const double rss = peak_rss_mb();
  o.require(rss < 2048, "peak memory above 2 GB");
  if (o.ok) {
    o.detail = fmt("reached N=24, mitigated L*=%.0f, peak RSS %.0f MB",
                   static_cast<double>(r.lstar_mitigated), rss);
  }
  return o;
}

}  // namespace

int main() {
  criterion(1, "exact energy", 1, exact_energy);
  criterion(2, "pre-optimization fidelity", 30, preoptimization);
  criterion(3, "gate scaling", 1, gate_scaling);
  criterion(4, "grouping", 1, grouping);
  criterion(5, "span property", 10, span_property);
  criterion(6, "decomposition correctness", 5, decomposition);
  criterion(7, "shot statistics", 120, shot_statistics);
  criterion(8, "mitigation round trip", 120, mitigation_round_trip);
  criterion(9, "benchmark verdict logic", 300, verdict_logic);
  criterion(10, "convergence demo", 120, convergence_demo);
  criterion(11, "scale ceiling (N=24, mitigated)", 900, scale_ceiling);
  std::printf("%s: %d of 11 criteria failed\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
