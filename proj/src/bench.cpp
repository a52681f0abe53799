#include "fhbench/bench.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "fhbench/ansatz.hpp"
#include "fhbench/estimator.hpp"
#include "fhbench/format.hpp"
#include "fhbench/vqe.hpp"

namespace fhbench {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  T out{};
  if constexpr (std::is_unsigned_v<T>) {
    if (!value.empty() && value[0] == '-') {
      throw ConfigError(key, "expected a non-negative integer, got '" + value + "'");
    }
  }
  if (!(in >> out) || !(in >> std::ws).eof()) {
    throw ConfigError(key, "cannot parse '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "on" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "off" || value == "0" || value == "no") return false;
  throw ConfigError(key, "expected true/false, got '" + value + "'");
}

void check_probability(const char* field, double p) {
  if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
    throw ConfigError(field, "must lie in [0, 1], got " + format_general(p, 6));
  }
}

std::string describe_length(std::size_t length) {
  return "L=" + std::to_string(length) + " (N=" + std::to_string(2 * length) + ")";
}

}  // namespace

// Configuration

NoiseModel BenchmarkConfig::noise_model() const {
  NoiseModel m = NoiseModel::uniform(2 * l_max, readout_p10, readout_p01,
                                     cnot_depolarizing, seed);
  m.trajectories = trajectories;
  return m;
}

void BenchmarkConfig::validate() const {
  if (l_min < 2) throw ConfigError("l_min", "must be at least 2");
  if (l_max < l_min) throw ConfigError("l_max", "must be at least l_min");
  if (l_max > 30) throw ConfigError("l_max", "statevector limit is 30 sites");
  if (shots < 1) throw ConfigError("shots", "must be at least 1");
  if (!std::isfinite(threshold) || threshold < 0.0) {
    throw ConfigError("threshold", "must be a non-negative number, got " +
                                       format_general(threshold, 6));
  }
  check_probability("readout_p10", readout_p10);
  check_probability("readout_p01", readout_p01);
  check_probability("cnot_depolarizing", cnot_depolarizing);
  if (trajectories < 1) throw ConfigError("trajectories", "must be at least 1");
  if (!std::isfinite(u)) throw ConfigError("u", "must be finite");
  if (!std::isfinite(t) || t <= 0.0) throw ConfigError("t", "must be positive");
}

BenchmarkConfig BenchmarkConfig::with_default_noise() {
  BenchmarkConfig c;
  c.readout_p10 = 0.01;
  c.readout_p01 = 0.03;
  c.cnot_depolarizing = 0.01;
  return c;
}

void apply_config_value(BenchmarkConfig& c, const std::string& key,
                        const std::string& value) {
  if (key == "l_min") c.l_min = parse_number<std::size_t>(key, value);
  else if (key == "l_max") c.l_max = parse_number<std::size_t>(key, value);
  else if (key == "shots") c.shots = parse_number<std::uint64_t>(key, value);
  else if (key == "calibration_shots") c.calibration_shots = parse_number<std::uint64_t>(key, value);
  else if (key == "threshold") c.threshold = parse_number<double>(key, value);
  else if (key == "readout_p10") c.readout_p10 = parse_number<double>(key, value);
  else if (key == "readout_p01") c.readout_p01 = parse_number<double>(key, value);
  else if (key == "cnot_depolarizing") c.cnot_depolarizing = parse_number<double>(key, value);
  else if (key == "trajectories") c.trajectories = parse_number<std::size_t>(key, value);
  else if (key == "mitigation") c.mitigation = parse_bool(key, value);
  else if (key == "u") c.u = parse_number<double>(key, value);
  else if (key == "t") c.t = parse_number<double>(key, value);
  else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
  else throw ConfigError(key, "unknown configuration key");
}

BenchmarkConfig parse_config(std::istream& in, BenchmarkConfig base) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no), "expected 'key = value'");
    }
    apply_config_value(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

void write_config(std::ostream& out, const BenchmarkConfig& c) {
  out << "l_min = " << c.l_min << '\n'
      << "l_max = " << c.l_max << '\n'
      << "shots = " << c.shots << '\n'
      << "calibration_shots = " << c.effective_calibration_shots() << '\n'
      << "threshold = " << format_exact(c.threshold) << '\n'
      << "readout_p10 = " << format_exact(c.readout_p10) << '\n'
      << "readout_p01 = " << format_exact(c.readout_p01) << '\n'
      << "cnot_depolarizing = " << format_exact(c.cnot_depolarizing) << '\n'
      << "trajectories = " << c.trajectories << '\n'
      << "mitigation = " << (c.mitigation ? "true" : "false") << '\n'
      << "u = " << format_exact(c.u) << '\n'
      << "t = " << format_exact(c.t) << '\n'
      << "seed = " << c.seed << '\n';
}

// Scoring

double error_score(double energy, double exact, std::size_t length, std::uint64_t shots) {
  if (length < 2) throw std::invalid_argument("chain length must be at least 2");
  if (shots < 1) throw std::invalid_argument("shots must be at least 1");
  return std::abs(energy - exact) / static_cast<double>(length) /
         std::sqrt(static_cast<double>(shots));
}

std::size_t determine_lstar(const std::vector<LengthResult>& results, double threshold,
                            Track track) {
  std::size_t lstar = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    if (i > 0 && r.length != results[i - 1].length + 1) {
      throw std::invalid_argument("results must be ordered by consecutive length");
    }
    const TrackResult* tr = nullptr;
    if (track == Track::Raw) {
      tr = &r.raw;
    } else if (r.mitigated) {
      tr = &*r.mitigated;
    }
    if (tr == nullptr || !(tr->score <= threshold)) break;
    lstar = r.length;
  }
  return lstar;
}

// Sweep

BenchmarkReport run_sweep(const BenchmarkConfig& config, const SweepHooks& hooks) {
  config.validate();
  BenchmarkReport report;
  report.config = config;
  report.optimizer = std::string(kLinearTrustRegionName);
  const NoiseModel full_noise = config.noise_model();
  if (hooks.calibration && hooks.calibration->n_qubits < 2 * config.l_max) {
    throw ConfigError("calibration", "file covers fewer than 2 * l_max qubits");
  }

  std::optional<std::size_t> raw_failed_at;
  std::optional<std::size_t> mitigated_failed_at;
  std::optional<std::size_t> mitigation_stopped_at;
  std::size_t last_length = 0;

  for (std::size_t length = config.l_min; length <= config.l_max; ++length) {
    try {
      LengthResult r;
      r.length = length;
      r.n_qubits = 2 * length;
      r.exact_energy = config.t * exact_gs_energy(length);

      PreoptimizeOptions pre;
      pre.t = config.t;
      pre.u = config.u;
      const auto params = preoptimize(length, pre);
      r.parameters = params.parameters;
      r.preoptimization_gap = params.gap;

      const QubitHamiltonian h = build_hamiltonian(length, config.t, config.u);
      const auto groups = group_commuting(h);
      r.groups = groups.size();
      const Circuit circuit = build_ladder_circuit(length, r.parameters);
      const NoiseModel noise = full_noise.truncated(r.n_qubits);

      std::vector<CountsTable> counts;
      for (std::size_t g = 0; g < groups.size(); ++g) {
        const std::uint64_t seed =
            derive_seed(config.seed, {tag(Stream::GroupMeasurement), length, g});
        counts.push_back(measure_circuit(circuit, groups[g].basis, config.shots, noise, seed));
        if (hooks.on_counts) hooks.on_counts(length, g, counts.back());
      }

      const auto raw = energy_from_group_counts(h, groups, counts);
      r.raw.energy = raw.value;
      r.raw.std_error = raw.std_error;
      r.raw.score = error_score(raw.value, r.exact_energy, length, config.shots);
      r.raw.pass = r.raw.score <= config.threshold;

      if (!config.mitigation) {
        r.mitigation_note = "mitigation disabled";
      } else if (r.n_qubits > kMaxMitigationQubits) {
        r.mitigation_note = "register of " + std::to_string(r.n_qubits) +
                            " qubits exceeds the mitigation limit of " +
                            std::to_string(kMaxMitigationQubits);
      } else {
        const CalibrationSet cal =
            hooks.calibration
                ? hooks.calibration->truncated(r.n_qubits)
                : calibrate(r.n_qubits, config.effective_calibration_shots(), noise,
                            derive_seed(config.seed, {tag(Stream::Calibration), length}));
        const auto mit = mitigated_energy(h, groups, counts, cal);
        TrackResult m;
        m.energy = mit.value;
        m.std_error = mit.std_error;
        m.score = error_score(mit.value, r.exact_energy, length, config.shots);
        m.pass = m.score <= config.threshold;
        r.mitigated = m;
      }

      if (!r.raw.pass && !raw_failed_at) raw_failed_at = length;
      if (config.mitigation && !mitigation_stopped_at && !mitigated_failed_at) {
        if (!r.mitigated) {
          mitigation_stopped_at = length;
        } else if (!r.mitigated->pass) {
          mitigated_failed_at = length;
        }
      }
      const bool primary_pass = r.mitigated ? r.mitigated->pass : r.raw.pass;
      report.results.push_back(std::move(r));
      last_length = length;
      if (hooks.on_length) hooks.on_length(report.results.back());
      if (!primary_pass) break;
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw std::runtime_error("at " + describe_length(length) + ": " + e.what());
    }
  }

  report.lstar_raw = determine_lstar(report.results, config.threshold, Track::Raw);
  report.lstar_mitigated =
      config.mitigation ? determine_lstar(report.results, config.threshold, Track::Mitigated)
                        : 0;

  auto stopped = [&] {
    return last_length == config.l_max
               ? "reached l_max, " + describe_length(config.l_max)
               : "sweep stopped by the primary track after " + describe_length(last_length);
  };
  report.termination_raw = raw_failed_at
                               ? "threshold exceeded at " + describe_length(*raw_failed_at)
                               : stopped();
  if (!config.mitigation) {
    report.termination_mitigated = "mitigation disabled";
  } else if (mitigated_failed_at) {
    report.termination_mitigated = "threshold exceeded at " + describe_length(*mitigated_failed_at);
  } else if (mitigation_stopped_at) {
    report.termination_mitigated =
        "mitigation limit reached at " + describe_length(*mitigation_stopped_at);
  } else {
    report.termination_mitigated = stopped();
  }
  return report;
}

// Output

std::string report_to_json(const BenchmarkReport& report) {
  using nlohmann::ordered_json;
  const auto& c = report.config;
  ordered_json config = {
      {"l_min", c.l_min},
      {"l_max", c.l_max},
      {"shots", c.shots},
      {"calibration_shots", c.effective_calibration_shots()},
      {"threshold", c.threshold},
      {"readout_p10", c.readout_p10},
      {"readout_p01", c.readout_p01},
      {"cnot_depolarizing", c.cnot_depolarizing},
      {"trajectories", c.trajectories},
      {"mitigation", c.mitigation},
      {"u", c.u},
      {"t", c.t},
      {"seed", c.seed},
  };

  auto track = [](const TrackResult& t) {
    return ordered_json{{"energy", t.energy},
                        {"std_error", t.std_error},
                        {"score", t.score},
                        {"pass", t.pass}};
  };
  ordered_json lengths = ordered_json::array();
  for (const auto& r : report.results) {
    ordered_json entry = {
        {"L", r.length},
        {"N", r.n_qubits},
        {"parameters", r.parameters},
        {"preoptimization_gap", r.preoptimization_gap},
        {"exact_energy", r.exact_energy},
        {"groups", r.groups},
        {"raw", track(r.raw)},
        {"mitigated", r.mitigated ? track(*r.mitigated) : ordered_json(nullptr)},
    };
    if (!r.mitigation_note.empty()) entry["mitigation_note"] = r.mitigation_note;
    lengths.push_back(std::move(entry));
  }

  const bool default_threshold = c.threshold == kDefaultThreshold;
  ordered_json doc = {
      {"schema", "fhbench.report"},
      {"schema_version", 1},
      {"threshold", c.threshold},
      {"threshold_is_default", default_threshold},
  };
  if (!default_threshold) {
    doc["threshold_notice"] = "NON-DEFAULT THRESHOLD " + format_general(c.threshold, 6) +
                              " (standard is 1e-3); results are not comparable with "
                              "default-threshold runs";
  }
  doc["config"] = std::move(config);
  doc["optimizer"] = report.optimizer;
  doc["results"] = std::move(lengths);
  doc["lstar"] = {{"raw", report.lstar_raw}, {"mitigated", report.lstar_mitigated}};
  doc["nstar"] = {{"raw", report.nstar_raw()}, {"mitigated", report.nstar_mitigated()}};
  doc["termination"] = {{"raw", report.termination_raw},
                        {"mitigated", report.termination_mitigated}};
  return doc.dump(2) + "\n";
}

void write_report_csv(std::ostream& out, const BenchmarkReport& report) {
  out << "N,raw_energy,mitigated_energy,exact_energy,raw_score,mitigated_score\n";
  for (const auto& r : report.results) {
    out << r.n_qubits << ',' << format_exact(r.raw.energy) << ',';
    if (r.mitigated) out << format_exact(r.mitigated->energy);
    out << ',' << format_exact(r.exact_energy) << ',' << format_exact(r.raw.score) << ',';
    if (r.mitigated) out << format_exact(r.mitigated->score);
    out << '\n';
  }
}

}  // namespace fhbench
