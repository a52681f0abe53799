#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fhbench/mitigation.hpp"
#include "fhbench/simulator.hpp"

namespace fhbench {

inline constexpr double kDefaultThreshold = 1e-3;
inline constexpr std::uint64_t kDefaultShots = 8192;

/// A configuration value failed validation; `field` names the offending key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct BenchmarkConfig {
  std::size_t l_min = 2;
  std::size_t l_max = 6;
  std::uint64_t shots = kDefaultShots;
  /// 0 means "same as shots".
  std::uint64_t calibration_shots = 0;
  double threshold = kDefaultThreshold;
  double readout_p10 = 0.0;
  double readout_p01 = 0.0;
  double cnot_depolarizing = 0.0;
  std::size_t trajectories = 64;
  bool mitigation = true;
  double u = 2.0;
  double t = 1.0;
  std::uint64_t seed = 0;

  /// Uniform readout rates on 2 * l_max qubits.
  NoiseModel noise_model() const;
  std::uint64_t effective_calibration_shots() const {
    return calibration_shots == 0 ? shots : calibration_shots;
  }
  /// Throws ConfigError naming the first bad field.
  void validate() const;

  /// Noise rates used by the `default` noise preset.
  static BenchmarkConfig with_default_noise();
};

/// Flat `key = value` lines, `#` comments. Unknown keys are rejected.
BenchmarkConfig parse_config(std::istream& in, BenchmarkConfig base = {});
void apply_config_value(BenchmarkConfig& config, const std::string& key,
                        const std::string& value);
void write_config(std::ostream& out, const BenchmarkConfig& config);

struct TrackResult {
  double energy = 0.0;
  double std_error = 0.0;
  double score = 0.0;
  bool pass = false;
};

struct LengthResult {
  std::size_t length = 0;
  std::size_t n_qubits = 0;
  std::vector<double> parameters;
  /// Statevector energy of `parameters` minus the exact energy.
  double preoptimization_gap = 0.0;
  double exact_energy = 0.0;
  std::size_t groups = 0;
  TrackResult raw;
  std::optional<TrackResult> mitigated;
  /// Why `mitigated` is empty, if it is.
  std::string mitigation_note;
};

enum class Track { Raw, Mitigated };

struct BenchmarkReport {
  BenchmarkConfig config;
  std::string optimizer;
  std::vector<LengthResult> results;
  std::size_t lstar_raw = 0;
  std::size_t lstar_mitigated = 0;
  std::size_t nstar_raw() const { return 2 * lstar_raw; }
  std::size_t nstar_mitigated() const { return 2 * lstar_mitigated; }
  std::string termination_raw;
  std::string termination_mitigated;
};

/// (1 / sqrt(M)) |E - E_gs| / L.
double error_score(double energy, double exact, std::size_t length, std::uint64_t shots);

/**
 * Largest L such that every length from the first result up to L passes on
 * `track` (score <= threshold); 0 if the first length fails. Results must be
 * ordered by consecutive L. A missing mitigated entry ends the track.
 */
std::size_t determine_lstar(const std::vector<LengthResult>& results, double threshold,
                            Track track);

struct SweepHooks {
  /// Called with every measured group table.
  std::function<void(std::size_t length, std::size_t group, const CountsTable&)> on_counts;
  /// Called after each length completes.
  std::function<void(const LengthResult&)> on_length;
  /// Replaces per-length calibration runs; sliced to each length's register.
  std::optional<CalibrationSet> calibration;
};

/**
 * For L = l_min, l_min + 1, ...: pre-optimize, measure every commuting group
 * with `shots` shots, score the raw energy and (N < 26, mitigation on) the
 * mitigated energy from the same counts. The sweep stops after the first
 * length where the primary track (mitigated when available, raw otherwise)
 * fails, or at l_max. Seeds: group g at length L uses
 * derive_seed(seed, {GroupMeasurement, L, g}); calibration uses
 * derive_seed(seed, {Calibration, L}).
 */
BenchmarkReport run_sweep(const BenchmarkConfig& config, const SweepHooks& hooks = {});

/// JSON document, schema "fhbench.report" version 1.
std::string report_to_json(const BenchmarkReport& report);

/// `N,raw_energy,mitigated_energy,exact_energy,raw_score,mitigated_score`;
/// absent mitigated values are left empty.
void write_report_csv(std::ostream& out, const BenchmarkReport& report);

}  // namespace fhbench
