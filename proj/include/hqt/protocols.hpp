#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hqt/coherent.hpp"
#include "hqt/fock.hpp"

namespace hqt {

/// Input qubit (a, b) via Bloch angles: a = cos(theta/2), b = e^{i phi} sin(theta/2).
struct QubitParams {
  double theta = 0.0;  // [0, pi]
  double phi = 0.0;    // [0, 2pi)

  cplx a() const { return {std::cos(0.5 * theta), 0.0}; }
  cplx b() const { return std::polar(std::sin(0.5 * theta), phi); }
};

enum class Direction { Cv2Dv, Dv2Cv };
std::string to_string(Direction d);

struct ProtocolConfig {
  double alpha = 1.0;  // real coherent amplitude; |alpha|^2 is the mean photon number
  Direction direction = Direction::Dv2Cv;
  std::optional<cplx> correction_delta;  // defaults to i*pi/(4 alpha)
  std::optional<int> cutoff_override;    // forces every CV cutoff in the Fock mirror
  bool with_fock_crosscheck = true;
  double crosscheck_tol = 1e-8;

  cplx delta() const;
  static ProtocolConfig cv2dv(double alpha2);
  static ProtocolConfig dv2cv(double alpha2);
};

// Measurement cases by roman label. CV->DV counts the five photon classes on
// Alice's splitter outputs, DV->CV the six rows of the outcome table
// (VNM sign x detector pattern).
enum class CaseLabel {
  Cv2Dv_I, Cv2Dv_II, Cv2Dv_III, Cv2Dv_IV, Cv2Dv_V,
  Dv2Cv_I, Dv2Cv_II, Dv2Cv_III, Dv2Cv_IV, Dv2Cv_V, Dv2Cv_VI,
};
std::string to_string(CaseLabel label);

enum class Correction {
  Identity,
  PauliX_Dv,
  PauliZ_Dv,
  PauliY_Dv,
  PhasePi_Cv,
  Displace_Cv,
  DisplaceAfterPhasePi_Cv,
  NoneFailure,
};
std::string to_string(Correction c);

struct BranchOutcome {
  CaseLabel label;
  double probability = 0.0;
  // Normalized state after the listed correction, full layout; empty terms
  // when the branch probability fell below the floor.
  SuperState conditional;
  Correction correction = Correction::NoneFailure;
  double fidelity = 0.0;
};

struct Reconciliation {
  std::string formula_id;
  double value_formula = 0.0;
  double value_oracle = 0.0;
  double abs_dev = 0.0;
};

struct WiringStage {
  std::string element;
  std::vector<int> in_modes;
  std::vector<int> out_modes;
};

struct EngineInfo {
  std::vector<std::pair<int, int>> cutoffs;  // (CV mode id, cutoff)
  bool crosscheck_run = false;
  double max_crosscheck_dev = 0.0;
  // Fock-mirror branch values, index-aligned with ProtocolReport::branches.
  std::vector<double> fock_probabilities;
  std::vector<double> fock_fidelities;
};

struct ProtocolReport {
  Direction direction = Direction::Dv2Cv;
  double alpha2 = 0.0;
  QubitParams qubit;
  cplx delta{0.0, 0.0};  // zero for CV->DV
  double x2 = 0.0;       // x^2 with x = exp(-|alpha|^2)
  std::vector<BranchOutcome> branches;
  double f_avg = 0.0;
  std::vector<Reconciliation> reconciliation;
  std::vector<WiringStage> wiring;
  EngineInfo engine;
  std::uint64_t seed = 0;
};

/// CV->DV teleportation: hybrid resource, 50:50 splitter, photon-class
/// branching over {(0,0),(even,0),(0,even),(odd,0),(0,odd)} and the listed
/// polarization corrections.
ProtocolReport run_cv2dv(const QubitParams& qubit, const ProtocolConfig& config);

/// DV->CV teleportation: entangled coherent resource, PBS / cross-Kerr / PBS
/// chain, splitter against an auxiliary |alpha>, then the six VNM x detector
/// branches with displacement / pi-phase corrections.
ProtocolReport run_dv2cv(const QubitParams& qubit, const ProtocolConfig& config);

struct BranchStat {
  CaseLabel label;
  std::uint64_t count = 0;
  double frequency = 0.0;
  double exact_probability = 0.0;
  double fidelity = 0.0;
};

struct MonteCarloReport {
  Direction direction = Direction::Dv2Cv;
  double alpha2 = 0.0;
  QubitParams qubit;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<BranchStat> branches;
  double mean_fidelity = 0.0;
  double exact_f_avg = 0.0;
};

/// Stochastic realization: concrete photon counts (and VNM signs) are sampled
/// per trial from the exact distributions, classified, corrected and scored.
/// Deterministic for a fixed seed.
MonteCarloReport run_monte_carlo(const QubitParams& qubit, const ProtocolConfig& config,
                                 std::uint64_t trials, std::uint64_t seed);

// Deterministic substream derivation from a master seed.
std::mt19937_64 make_rng_stream(std::uint64_t master_seed, std::uint64_t stream_id);

// References the branch fidelities are measured against.
SuperState dv_information_state(const QubitParams& qubit, int mode_id);
SuperState cv_information_state(const QubitParams& qubit, double alpha, int mode_id);
SuperState odd_cat_state(double alpha, int mode_id);

}  // namespace hqt
