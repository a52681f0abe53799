#include "fhbench/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "fhbench/ansatz.hpp"
#include "fhbench/bench.hpp"
#include "fhbench/format.hpp"
#include "fhbench/mitigation.hpp"
#include "fhbench/pauli_model.hpp"
#include "fhbench/svg_plot.hpp"
#include "fhbench/vqe.hpp"

namespace fhbench {

namespace fs = std::filesystem;

namespace {

struct GlobalFlags {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> shots;
  std::string out_dir = ".";
  std::string config_path;
};

struct NoiseFlags {
  std::string preset;
  std::optional<double> p10;
  std::optional<double> p01;
  std::optional<double> p2;
  std::optional<std::size_t> trajectories;

  void attach(CLI::App* cmd) {
    cmd->add_option("--noise", preset, "Noise preset: none or default")
        ->check(CLI::IsMember({"none", "default"}));
    cmd->add_option("--p10", p10, "Readout P(1|0) on every qubit");
    cmd->add_option("--p01", p01, "Readout P(0|1) on every qubit");
    cmd->add_option("--p2", p2, "Depolarizing probability after each CNOT");
    cmd->add_option("--trajectories", trajectories, "Gate-noise trajectories per circuit");
  }
};

std::string read_file(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw ConfigError(what, "cannot open '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

BenchmarkConfig resolve_config(const GlobalFlags& g, const NoiseFlags* noise) {
  BenchmarkConfig c;
  if (!g.config_path.empty()) {
    std::istringstream in(read_file(g.config_path, "config"));
    c = parse_config(in, c);
  }
  if (noise) {
    if (noise->preset == "none") {
      c.readout_p10 = c.readout_p01 = c.cnot_depolarizing = 0.0;
    } else if (noise->preset == "default") {
      const auto d = BenchmarkConfig::with_default_noise();
      c.readout_p10 = d.readout_p10;
      c.readout_p01 = d.readout_p01;
      c.cnot_depolarizing = d.cnot_depolarizing;
    }
    if (noise->p10) c.readout_p10 = *noise->p10;
    if (noise->p01) c.readout_p01 = *noise->p01;
    if (noise->p2) c.cnot_depolarizing = *noise->p2;
    if (noise->trajectories) c.trajectories = *noise->trajectories;
  }
  if (g.seed) c.seed = *g.seed;
  if (g.shots) c.shots = *g.shots;
  return c;
}

void write_resolved_config(const fs::path& dir, const BenchmarkConfig& c) {
  std::ostringstream s;
  write_config(s, c);
  write_file(dir / "resolved_config.txt", s.str());
}

std::vector<double> parse_params(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::istringstream v(item);
    double x = 0.0;
    if (!(v >> x) || !(v >> std::ws).eof()) {
      throw ConfigError("params", "cannot parse '" + item + "' as a number");
    }
    out.push_back(x);
  }
  return out;
}

PlotSpec energy_plot(const BenchmarkReport& r) {
  PlotSpec p;
  p.title = "Ground-state energy vs qubits";
  p.x_label = "N (qubits)";
  p.y_label = "energy";
  Series exact{"exact", {}, {}, "#000000", true, false};
  Series raw{"raw", {}, {}, "#1f77b4"};
  Series mit{"mitigated", {}, {}, "#ff7f0e"};
  for (const auto& l : r.results) {
    const double n = static_cast<double>(l.n_qubits);
    exact.x.push_back(n);
    exact.y.push_back(l.exact_energy);
    raw.x.push_back(n);
    raw.y.push_back(l.raw.energy);
    if (l.mitigated) {
      mit.x.push_back(n);
      mit.y.push_back(l.mitigated->energy);
    }
  }
  p.lines = {exact, raw};
  if (!mit.x.empty()) p.lines.push_back(mit);
  return p;
}

PlotSpec score_plot(const BenchmarkReport& r) {
  PlotSpec p;
  p.title = "Error score vs qubits";
  p.x_label = "N (qubits)";
  p.y_label = "error score";
  p.log_y = true;
  Series raw{"raw", {}, {}, "#1f77b4"};
  Series mit{"mitigated", {}, {}, "#ff7f0e"};
  for (const auto& l : r.results) {
    const double n = static_cast<double>(l.n_qubits);
    raw.x.push_back(n);
    raw.y.push_back(l.raw.score);
    if (l.mitigated) {
      mit.x.push_back(n);
      mit.y.push_back(l.mitigated->score);
    }
  }
  p.lines = {raw};
  if (!mit.x.empty()) p.lines.push_back(mit);
  p.rules.push_back({r.config.threshold, "threshold " + format_general(r.config.threshold, 3)});
  return p;
}

PlotSpec correction_plot(const BenchmarkReport& r) {
  PlotSpec p;
  p.title = "Mitigation correction (raw - mitigated)";
  p.x_label = "N (qubits)";
  p.y_label = "energy correction";
  BarSeries bars{"raw - mitigated", {}, {}};
  for (const auto& l : r.results) {
    if (!l.mitigated) continue;
    bars.x.push_back(static_cast<double>(l.n_qubits));
    bars.height.push_back(l.raw.energy - l.mitigated->energy);
  }
  p.bars.push_back(bars);
  return p;
}

PlotSpec convergence_plot(const OptimizerTrace& trace, double exact, std::size_t length) {
  PlotSpec p;
  p.title = "Shot-based VQE, L=" + std::to_string(length);
  p.x_label = "evaluation";
  p.y_label = "energy";
  Series e{"measured", {}, {}, "#1f77b4"};
  for (const auto& it : trace.iterations) {
    e.x.push_back(static_cast<double>(it.step));
    e.y.push_back(it.energy);
  }
  p.lines.push_back(e);
  p.rules.push_back({exact, "exact", "#000000"});
  return p;
}

// Subcommands

int cmd_exact(std::size_t length, std::ostream& out) {
  out << format_fixed(exact_gs_energy(length), 12) << '\n';
  return kExitOk;
}

struct CircuitFlags {
  std::size_t length = 2;
  std::string params;
  bool qasm = false;
  std::string output;
};

int cmd_circuit(const CircuitFlags& f, const GlobalFlags& g, std::ostream& out) {
  const BenchmarkConfig c = resolve_config(g, nullptr);
  std::vector<double> angles;
  if (f.params.empty()) {
    PreoptimizeOptions pre;
    pre.t = c.t;
    pre.u = c.u;
    angles = preoptimize(f.length, pre).parameters;
  } else {
    angles = parse_params(f.params);
    if (angles.size() != f.length - 1) {
      throw ConfigError("params", "expected " + std::to_string(f.length - 1) +
                                      " values for L=" + std::to_string(f.length) + ", got " +
                                      std::to_string(angles.size()));
    }
  }
  const Circuit circuit = build_ladder_circuit(f.length, angles);
  std::string text;
  if (f.qasm) {
    text = to_qasm(circuit);
  } else {
    std::ostringstream s;
    write_circuit_text(s, circuit);
    text = s.str();
  }
  if (f.output.empty()) {
    out << text;
  } else {
    write_file(f.output, text);
  }
  return kExitOk;
}

struct HamiltonianFlags {
  std::size_t length = 2;
  std::optional<double> u;
  std::optional<double> t;
  bool groups = false;
  std::string output;
};

int cmd_hamiltonian(const HamiltonianFlags& f, const GlobalFlags& g, std::ostream& out) {
  BenchmarkConfig c = resolve_config(g, nullptr);
  if (f.u) c.u = *f.u;
  if (f.t) c.t = *f.t;
  c.validate();
  const QubitHamiltonian h = build_hamiltonian(f.length, c.t, c.u);
  std::ostringstream s;
  if (f.groups) {
    for (const auto& grp : group_commuting(h)) {
      s << "# group " << to_string(grp.kind) << " basis " << grp.basis.to_string() << '\n';
      QubitHamiltonian part;
      part.n_qubits = h.n_qubits;
      part.identity_offset = grp.identity_offset;
      part.terms = grp.terms;
      write_hamiltonian(s, part);
    }
  } else {
    write_hamiltonian(s, h);
  }
  if (f.output.empty()) {
    out << s.str();
  } else {
    write_file(f.output, s.str());
  }
  return kExitOk;
}

int cmd_calibrate(std::optional<std::size_t> qubits, const NoiseFlags& nf,
                  const GlobalFlags& g, std::ostream& out) {
  const BenchmarkConfig c = resolve_config(g, &nf);
  c.validate();
  const std::size_t n = qubits.value_or(2 * c.l_max);
  if (n < 1 || n > kMaxMitigationQubits) {
    throw ConfigError("qubits", "must lie in [1, " + std::to_string(kMaxMitigationQubits) + "]");
  }
  NoiseModel noise = NoiseModel::uniform(n, c.readout_p10, c.readout_p01, 0.0, c.seed);
  const CalibrationSet cal = calibrate(n, c.effective_calibration_shots(), noise,
                                       derive_seed(c.seed, {tag(Stream::Calibration)}));
  std::ostringstream s;
  write_calibration(s, cal);
  const fs::path dir(g.out_dir);
  write_file(dir / "calibration.txt", s.str());
  write_resolved_config(dir, c);
  out << "wrote " << (dir / "calibration.txt").string() << " (" << n << " qubits, "
      << cal.circuits << " circuits, " << cal.shots << " shots each)\n";
  return kExitOk;
}

struct RunFlags {
  std::optional<std::size_t> l_min;
  std::optional<std::size_t> l_max;
  std::optional<double> threshold;
  bool no_mitigation = false;
  std::string calibration;
  bool write_counts = false;
};

int cmd_run(const RunFlags& f, const NoiseFlags& nf, const GlobalFlags& g, std::ostream& out) {
  BenchmarkConfig c = resolve_config(g, &nf);
  if (f.l_min) c.l_min = *f.l_min;
  if (f.l_max) c.l_max = *f.l_max;
  if (f.threshold) c.threshold = *f.threshold;
  if (f.no_mitigation) c.mitigation = false;
  c.validate();

  const fs::path dir(g.out_dir);
  SweepHooks hooks;
  if (!f.calibration.empty()) {
    std::istringstream in(read_file(f.calibration, "calibration"));
    hooks.calibration = read_calibration(in);
  }
  if (f.write_counts) {
    hooks.on_counts = [&dir](std::size_t length, std::size_t group, const CountsTable& t) {
      std::ostringstream s;
      write_counts(s, t);
      write_file(dir / "counts" /
                     ("L" + std::to_string(length) + "_g" + std::to_string(group) + ".txt"),
                 s.str());
    };
  }
  hooks.on_length = [&out, &c](const LengthResult& r) {
    out << "L=" << r.length << " N=" << r.n_qubits << " exact=" << format_fixed(r.exact_energy, 6)
        << " raw=" << format_fixed(r.raw.energy, 6) << " score=" << format_general(r.raw.score, 3)
        << (r.raw.pass ? " pass" : " FAIL");
    if (r.mitigated) {
      out << " | mitigated=" << format_fixed(r.mitigated->energy, 6)
          << " score=" << format_general(r.mitigated->score, 3)
          << (r.mitigated->pass ? " pass" : " FAIL");
    } else if (c.mitigation) {
      out << " | " << r.mitigation_note;
    }
    out << '\n';
  };

  if (c.threshold != kDefaultThreshold) {
    out << "NOTE: non-default threshold " << format_general(c.threshold, 6) << '\n';
  }
  const BenchmarkReport report = run_sweep(c, hooks);

  write_resolved_config(dir, c);
  write_file(dir / "report.json", report_to_json(report));
  std::ostringstream csv;
  write_report_csv(csv, report);
  write_file(dir / "results.csv", csv.str());
  write_file(dir / "energy_vs_N.svg", render_svg(energy_plot(report)));
  write_file(dir / "error_score_vs_N.svg", render_svg(score_plot(report)));
  write_file(dir / "mitigation_correction_vs_N.svg", render_svg(correction_plot(report)));

  out << "raw: L*=" << report.lstar_raw << " N*=" << report.nstar_raw() << " ("
      << report.termination_raw << ")\n";
  if (c.mitigation) {
    out << "mitigated: L*=" << report.lstar_mitigated << " N*=" << report.nstar_mitigated()
        << " (" << report.termination_mitigated << ")\n";
  }
  return kExitOk;
}

struct ConvergenceFlags {
  std::size_t length = 3;
  std::string init = "zero";
  std::size_t max_iter = 20;
  double rho_begin = ShotOptimizeOptions{}.rho_begin;
};

int cmd_convergence(const ConvergenceFlags& f, const NoiseFlags& nf, const GlobalFlags& g,
                    std::ostream& out) {
  const BenchmarkConfig c = resolve_config(g, &nf);
  c.validate();
  std::vector<double> init(f.length - 1, 0.0);
  if (f.init == "seeded") {
    PreoptimizeOptions pre;
    pre.t = c.t;
    pre.u = c.u;
    init = preoptimize(f.length, pre).parameters;
  }
  NoiseModel noise = NoiseModel::uniform(2 * f.length, c.readout_p10, c.readout_p01,
                                         c.cnot_depolarizing, c.seed);
  noise.trajectories = c.trajectories;
  ShotOptimizeOptions opt;
  opt.t = c.t;
  opt.u = c.u;
  opt.rho_begin = f.rho_begin;
  const OptimizerTrace trace = optimize_shotbased(f.length, init, c.shots, noise, f.max_iter, opt);
  const double exact = c.t * exact_gs_energy(f.length);

  const fs::path dir(g.out_dir);
  std::ostringstream csv;
  write_trace_csv(csv, trace);
  write_file(dir / "convergence.csv", csv.str());
  write_file(dir / "convergence.svg", render_svg(convergence_plot(trace, exact, f.length)));
  write_resolved_config(dir, c);
  out << "evaluations=" << trace.iterations.size()
      << " final=" << format_fixed(trace.final_energy, 6)
      << " exact=" << format_fixed(exact, 6) << '\n';
  return kExitOk;
}

int cmd_score(double energy, std::size_t length, std::optional<double> threshold,
              const GlobalFlags& g, std::ostream& out) {
  BenchmarkConfig c = resolve_config(g, nullptr);
  if (threshold) c.threshold = *threshold;
  c.validate();
  const double exact = c.t * exact_gs_energy(length);
  const double score = error_score(energy, exact, length, c.shots);
  out << "score " << format_exact(score) << '\n'
      << (score <= c.threshold ? "PASS" : "FAIL") << " (threshold "
      << format_general(c.threshold, 6) << ", M=" << c.shots << ")\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fermi-Hubbard single-particle VQE benchmark"};
  app.name("fhbench");
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  app.add_option("--seed", g.seed, "Base seed for every random stream");
  app.add_option("--shots", g.shots, "Shots per measured circuit")->check(CLI::PositiveNumber);
  app.add_option("--out-dir", g.out_dir, "Directory for output files");
  app.add_option("--config", g.config_path, "Flat key = value configuration file");

  const auto length_range = CLI::Range(std::size_t{2}, std::size_t{30});

  std::size_t exact_length = 2;
  auto* exact = app.add_subcommand("exact", "Print the exact single-particle ground energy");
  exact->add_option("--length,-L", exact_length, "Chain length")->required()->check(
      CLI::Range(std::size_t{2}, std::size_t{1000000}));

  CircuitFlags cf;
  auto* circuit = app.add_subcommand("circuit", "Print the ladder circuit");
  circuit->add_option("--length,-L", cf.length, "Chain length")->required()->check(length_range);
  circuit->add_option("--params", cf.params, "Comma-separated angles (default: pre-optimized)");
  circuit->add_flag("--qasm", cf.qasm, "Emit OpenQASM 2.0");
  circuit->add_option("--output,-o", cf.output, "Write to a file instead of stdout");

  HamiltonianFlags hf;
  auto* ham = app.add_subcommand("hamiltonian", "Print the qubit Hamiltonian");
  ham->add_option("--length,-L", hf.length, "Chain length")->required()->check(
      CLI::Range(std::size_t{2}, std::size_t{512}));
  ham->add_option("--u", hf.u, "On-site interaction");
  ham->add_option("--t", hf.t, "Hopping amplitude");
  ham->add_flag("--groups", hf.groups, "Print the commuting groups");
  ham->add_option("--output,-o", hf.output, "Write to a file instead of stdout");

  std::optional<std::size_t> cal_qubits;
  NoiseFlags cal_noise;
  auto* cal = app.add_subcommand("calibrate", "Run the two readout calibration circuits");
  cal->add_option("--qubits,-n", cal_qubits, "Register size (default 2 * l_max)");
  cal_noise.attach(cal);

  RunFlags rf;
  NoiseFlags run_noise;
  auto* run = app.add_subcommand("run", "Run the benchmark sweep");
  run->add_option("--l-min", rf.l_min, "First chain length");
  run->add_option("--l-max", rf.l_max, "Last chain length");
  run->add_option("--threshold", rf.threshold, "Error-score threshold");
  run->add_flag("--no-mitigation", rf.no_mitigation, "Skip readout mitigation");
  run->add_option("--calibration", rf.calibration, "Calibration file from `calibrate`");
  run->add_flag("--write-counts", rf.write_counts, "Save every counts table");
  run_noise.attach(run);

  ConvergenceFlags vf;
  NoiseFlags conv_noise;
  auto* conv = app.add_subcommand("convergence", "Shot-based VQE optimizer trace");
  conv->add_option("--length,-L", vf.length, "Chain length")->check(length_range);
  conv->add_option("--init", vf.init, "Initial point: zero or seeded")
      ->check(CLI::IsMember({"zero", "seeded"}));
  conv->add_option("--max-iter", vf.max_iter, "Evaluations after the initial one");
  conv->add_option("--rho-begin", vf.rho_begin, "Initial trust radius")
      ->check(CLI::PositiveNumber);
  conv_noise.attach(conv);

  double score_energy = 0.0;
  std::size_t score_length = 2;
  std::optional<double> score_threshold;
  auto* score = app.add_subcommand("score", "Score a measured energy");
  score->add_option("--energy,-E", score_energy, "Measured energy")->required();
  score->add_option("--length,-L", score_length, "Chain length")->required()->check(
      CLI::Range(std::size_t{2}, std::size_t{1000000}));
  score->add_option("--threshold", score_threshold, "Error-score threshold");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*exact) return cmd_exact(exact_length, out);
    if (*circuit) return cmd_circuit(cf, g, out);
    if (*ham) return cmd_hamiltonian(hf, g, out);
    if (*cal) return cmd_calibrate(cal_qubits, cal_noise, g, out);
    if (*run) return cmd_run(rf, run_noise, g, out);
    if (*conv) return cmd_convergence(vf, conv_noise, g, out);
    if (*score) return cmd_score(score_energy, score_length, score_threshold, g, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace fhbench
