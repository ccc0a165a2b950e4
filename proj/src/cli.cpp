#include "hqt/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <optional>

#include "hqt/analytics.hpp"
#include "hqt/protocols.hpp"
#include "hqt/report_io.hpp"

namespace hqt::cli {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct CommonOpts {
  double alpha2 = 1.0;
  double theta = 0.0;
  double phi = 0.0;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 0;
  int cutoff = -1;  // <0: use the cutoff rule
  std::string format = "json";
  std::string out_path;
  std::string grid = "1:8:0.5";
  std::string direction = "dv2cv";
  std::string engine = "both";
  double tol = 1e-8;
  int qubits = 5;
  bool fixed_qubit = false;
};

void add_qubit_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--theta", o.theta, "Bloch polar angle in [0, pi]")
      ->check(CLI::Range(0.0, kPi));
  cmd->add_option("--phi", o.phi, "Bloch azimuth in [0, 2pi)")
      ->check(CLI::Range(0.0, 2.0 * kPi));
}

void add_output_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--format", o.format, "Artifact format")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--out", o.out_path, "Artifact path (default: artifact on stdout)");
}

std::vector<double> parse_grid(const std::string& text) {
  const auto c1 = text.find(':');
  const auto c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw std::invalid_argument("grid must be a:b:step");
  const double a = std::stod(text.substr(0, c1));
  const double b = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
  const double step = std::stod(text.substr(c2 + 1));
  if (!(a > 0.0) || !(step > 0.0) || b < a)
    throw std::invalid_argument("grid must satisfy 0 < a <= b with step > 0");
  std::vector<double> grid;
  for (int i = 0;; ++i) {
    const double v = a + i * step;
    if (v > b + 1e-9 * step) break;
    grid.push_back(v);
  }
  return grid;
}

// Writes the artifact to --out (human summary on stdout) or, with no --out,
// emits the artifact itself on stdout.
int deliver(const std::string& artifact, const std::string& summary, const CommonOpts& o,
            std::ostream& out, std::ostream& err) {
  if (o.out_path.empty()) {
    out << artifact;
    return 0;
  }
  std::ofstream f(o.out_path, std::ios::binary);
  if (!f) {
    err << "error: cannot open output path '" << o.out_path << "'\n";
    return 1;
  }
  f << artifact;
  if (!f) {
    err << "error: failed writing '" << o.out_path << "'\n";
    return 1;
  }
  out << summary;
  out << "artifact written to " << o.out_path << "\n";
  return 0;
}

ProtocolConfig make_config(const CommonOpts& o, Direction dir) {
  ProtocolConfig cfg =
      dir == Direction::Cv2Dv ? ProtocolConfig::cv2dv(o.alpha2) : ProtocolConfig::dv2cv(o.alpha2);
  if (o.cutoff >= 0) cfg.cutoff_override = o.cutoff;
  return cfg;
}

int run_protocol_cmd(const CommonOpts& o, Direction dir, std::ostream& out, std::ostream& err) {
  const QubitParams qubit{o.theta, o.phi};
  const ProtocolConfig cfg = make_config(o, dir);
  ProtocolReport report = dir == Direction::Cv2Dv ? run_cv2dv(qubit, cfg) : run_dv2cv(qubit, cfg);
  report.seed = o.seed;
  const std::string artifact = o.format == "csv" ? io::to_csv(report) : io::to_json(report);
  return deliver(artifact, io::human_summary(report), o, out, err);
}

int run_sample_cmd(const CommonOpts& o, std::ostream& out, std::ostream& err) {
  const Direction dir = o.direction == "cv2dv" ? Direction::Cv2Dv : Direction::Dv2Cv;
  const QubitParams qubit{o.theta, o.phi};
  ProtocolConfig cfg = make_config(o, dir);
  cfg.with_fock_crosscheck = false;
  const MonteCarloReport report = run_monte_carlo(qubit, cfg, o.trials, o.seed);
  const std::string artifact = o.format == "csv" ? io::to_csv(report) : io::to_json(report);
  return deliver(artifact, io::human_summary(report), o, out, err);
}

int run_sweep_cmd(const CommonOpts& o, std::ostream& out, std::ostream& err) {
  analytics::SweepSpec spec;
  spec.alpha2_grid = parse_grid(o.grid);
  spec.bloch_averaged = !o.fixed_qubit;
  spec.qubit = QubitParams{o.theta, o.phi};
  analytics::SweepEngine engine = analytics::SweepEngine::Both;
  if (o.engine == "formula") engine = analytics::SweepEngine::Formula;
  if (o.engine == "oracle") engine = analytics::SweepEngine::Oracle;
  const analytics::SweepTable table = analytics::sweep(spec, engine);
  const std::string artifact =
      o.format == "csv" ? io::to_csv(table) : io::to_json(table, o.seed);
  return deliver(artifact, io::human_summary(table), o, out, err);
}

int run_verify_cmd(const CommonOpts& o, std::ostream& out, std::ostream& err) {
  io::VerifyReport rep;
  rep.alpha2 = o.alpha2;
  rep.seed = o.seed;
  rep.qubits = o.qubits;
  rep.tol = o.tol;
  std::mt19937_64 rng = make_rng_stream(o.seed, 7);
  for (int q = 0; q < o.qubits; ++q) {
    const QubitParams qubit{std::acos(1.0 - 2.0 * uniform01(rng)), 2.0 * kPi * uniform01(rng)};
    ProtocolConfig cv = make_config(o, Direction::Cv2Dv);
    cv.crosscheck_tol = o.tol;
    ProtocolConfig dv = make_config(o, Direction::Dv2Cv);
    dv.crosscheck_tol = o.tol;
    rep.max_dev_cv2dv =
        std::max(rep.max_dev_cv2dv, run_cv2dv(qubit, cv).engine.max_crosscheck_dev);
    rep.max_dev_dv2cv =
        std::max(rep.max_dev_dv2cv, run_dv2cv(qubit, dv).engine.max_crosscheck_dev);
  }
  rep.pass = rep.max_dev_cv2dv <= o.tol && rep.max_dev_dv2cv <= o.tol;
  // verify always reports its verdict on stdout; the artifact is optional
  out << io::human_summary(rep);
  if (!o.out_path.empty()) {
    const std::string artifact = o.format == "csv" ? io::to_csv(rep) : io::to_json(rep);
    std::ofstream f(o.out_path, std::ios::binary);
    if (!f) {
      err << "error: cannot open output path '" << o.out_path << "'\n";
      return 1;
    }
    f << artifact;
    out << "artifact written to " << o.out_path << "\n";
  }
  if (!rep.pass) {
    err << "verify: engine disagreement above tolerance\n";
    return 2;
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hybrid DV/CV teleportation simulator and verifier"};
  app.require_subcommand(1);
  CommonOpts o;

  auto* cv2dv = app.add_subcommand("cv2dv", "Teleport a coherent-state qubit into polarization");
  cv2dv->add_option("--alpha2", o.alpha2, "Mean photon number |alpha|^2")
      ->required()
      ->check(CLI::PositiveNumber);
  add_qubit_flags(cv2dv, o);
  cv2dv->add_option("--cutoff", o.cutoff, "Fock cutoff override");
  cv2dv->add_option("--seed", o.seed, "Echoed into the artifact");
  add_output_flags(cv2dv, o);

  auto* dv2cv = app.add_subcommand("dv2cv", "Teleport a polarization qubit into coherent states");
  dv2cv->add_option("--alpha2", o.alpha2, "Mean photon number |alpha|^2")
      ->required()
      ->check(CLI::PositiveNumber);
  add_qubit_flags(dv2cv, o);
  dv2cv->add_option("--cutoff", o.cutoff, "Fock cutoff override");
  dv2cv->add_option("--seed", o.seed, "Echoed into the artifact");
  add_output_flags(dv2cv, o);

  auto* sample = app.add_subcommand("sample", "Monte-Carlo measurement sampling");
  sample->add_option("--alpha2", o.alpha2, "Mean photon number |alpha|^2")
      ->required()
      ->check(CLI::PositiveNumber);
  sample->add_option("--direction", o.direction, "Protocol direction")
      ->check(CLI::IsMember({"cv2dv", "dv2cv"}));
  add_qubit_flags(sample, o);
  sample->add_option("--trials", o.trials, "Number of trials")->check(CLI::PositiveNumber);
  sample->add_option("--seed", o.seed, "Master RNG seed");
  add_output_flags(sample, o);

  auto* sweep = app.add_subcommand("sweep", "Bloch-averaged fidelity over an |alpha|^2 grid");
  sweep->add_option("--grid", o.grid, "Grid a:b:step over |alpha|^2");
  sweep->add_option("--engine", o.engine, "Columns to fill")
      ->check(CLI::IsMember({"formula", "oracle", "both"}));
  sweep->add_flag("--fixed-qubit", o.fixed_qubit,
                  "Evaluate at --theta/--phi instead of Bloch averaging");
  add_qubit_flags(sweep, o);
  sweep->add_option("--seed", o.seed, "Echoed into the artifact");
  add_output_flags(sweep, o);

  auto* verify = app.add_subcommand("verify", "Cross-check the exact engine against the Fock oracle");
  verify->add_option("--alpha2", o.alpha2, "Mean photon number |alpha|^2")
      ->required()
      ->check(CLI::PositiveNumber);
  verify->add_option("--seed", o.seed, "Qubit sampling seed");
  verify->add_option("--qubits", o.qubits, "Random qubits to test")->check(CLI::PositiveNumber);
  verify->add_option("--tol", o.tol, "Engine agreement tolerance")->check(CLI::PositiveNumber);
  verify->add_option("--cutoff", o.cutoff, "Fock cutoff override");
  add_output_flags(verify, o);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (cv2dv->parsed()) return run_protocol_cmd(o, Direction::Cv2Dv, out, err);
    if (dv2cv->parsed()) return run_protocol_cmd(o, Direction::Dv2Cv, out, err);
    if (sample->parsed()) return run_sample_cmd(o, out, err);
    if (sweep->parsed()) return run_sweep_cmd(o, out, err);
    if (verify->parsed()) return run_verify_cmd(o, out, err);
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  err << "usage error: no subcommand\n";
  return 1;
}

}  // namespace hqt::cli
