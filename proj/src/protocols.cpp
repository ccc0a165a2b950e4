#include "hqt/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hqt/analytics.hpp"

namespace hqt {

namespace {

constexpr double kPi = 3.14159265358979323846;

const std::array<std::array<cplx, 2>, 2> kPauliX = {{{cplx(0), cplx(1)}, {cplx(1), cplx(0)}}};
const std::array<std::array<cplx, 2>, 2> kPauliZ = {{{cplx(1), cplx(0)}, {cplx(0), cplx(-1)}}};
// |H><V| - |V><H|, the listed case-v correction (Pauli Y up to global phase).
const std::array<std::array<cplx, 2>, 2> kFlipY = {{{cplx(0), cplx(1)}, {cplx(-1), cplx(0)}}};

void relabel_mode(SuperState& s, int old_id, int new_id) {
  s.layout[s.mode_index(old_id)].id = new_id;
}

void relabel_mode(fock::FockState& s, int old_id, int new_id) {
  s.modes[s.mode_pos(old_id)].id = new_id;
}

void require_direction(const ProtocolConfig& config, Direction expected) {
  if (config.direction != expected)
    throw std::invalid_argument("protocol run invoked with the wrong direction");
  if (!(config.alpha > 0.0))
    throw std::domain_error("protocol configuration: alpha must be positive");
}

double branch_dev(double exact, double fockv) { return std::abs(exact - fockv); }

}  // namespace

std::string to_string(Direction d) { return d == Direction::Cv2Dv ? "cv2dv" : "dv2cv"; }

std::string to_string(CaseLabel label) {
  switch (label) {
    case CaseLabel::Cv2Dv_I:
    case CaseLabel::Dv2Cv_I: return "i";
    case CaseLabel::Cv2Dv_II:
    case CaseLabel::Dv2Cv_II: return "ii";
    case CaseLabel::Cv2Dv_III:
    case CaseLabel::Dv2Cv_III: return "iii";
    case CaseLabel::Cv2Dv_IV:
    case CaseLabel::Dv2Cv_IV: return "iv";
    case CaseLabel::Cv2Dv_V:
    case CaseLabel::Dv2Cv_V: return "v";
    case CaseLabel::Dv2Cv_VI: return "vi";
  }
  return "?";
}

std::string to_string(Correction c) {
  switch (c) {
    case Correction::Identity: return "identity";
    case Correction::PauliX_Dv: return "pauli_x";
    case Correction::PauliZ_Dv: return "pauli_z";
    case Correction::PauliY_Dv: return "pauli_y";
    case Correction::PhasePi_Cv: return "phase_pi";
    case Correction::Displace_Cv: return "displace";
    case Correction::DisplaceAfterPhasePi_Cv: return "displace_after_phase_pi";
    case Correction::NoneFailure: return "none_failure";
  }
  return "?";
}

cplx ProtocolConfig::delta() const {
  if (correction_delta) return *correction_delta;
  return cplx(0.0, kPi / (4.0 * alpha));
}

ProtocolConfig ProtocolConfig::cv2dv(double alpha2) {
  ProtocolConfig c;
  c.alpha = std::sqrt(alpha2);
  c.direction = Direction::Cv2Dv;
  return c;
}

ProtocolConfig ProtocolConfig::dv2cv(double alpha2) {
  ProtocolConfig c;
  c.alpha = std::sqrt(alpha2);
  c.direction = Direction::Dv2Cv;
  return c;
}

std::mt19937_64 make_rng_stream(std::uint64_t master_seed, std::uint64_t stream_id) {
  std::uint64_t x = master_seed + 0x9E3779B97F4A7C15ULL * (stream_id + 1);
  for (int i = 0; i < 2; ++i) {
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    x = x ^ (x >> 31);
  }
  return std::mt19937_64(x);
}

SuperState dv_information_state(const QubitParams& qubit, int mode_id) {
  return add(scale(make_dv_state(mode_id, Occupancy::H), qubit.a()),
             scale(make_dv_state(mode_id, Occupancy::V), qubit.b()));
}

SuperState cv_information_state(const QubitParams& qubit, double alpha, int mode_id) {
  return add(scale(make_cv_state(mode_id, alpha), qubit.a()),
             scale(make_cv_state(mode_id, -alpha), qubit.b()));
}

SuperState odd_cat_state(double alpha, int mode_id) {
  return add(make_cv_state(mode_id, alpha), scale(make_cv_state(mode_id, -alpha), cplx(-1.0)));
}

// ---------------------------------------------------------------------------
// CV -> DV
// ---------------------------------------------------------------------------

namespace {

// Normalized state after Alice's splitter; layout order [3, 4, 2].
SuperState cv2dv_premeasure(const QubitParams& qubit, const ProtocolConfig& config) {
  const double alpha = config.alpha;
  const SuperState info = cv_information_state(qubit, alpha, 0);
  const SuperState resource =
      scale(add(tensor(make_cv_state(1, alpha), make_dv_state(2, Occupancy::H)),
                tensor(make_cv_state(1, -alpha), make_dv_state(2, Occupancy::V))),
            cplx(1.0 / std::sqrt(2.0)));
  SuperState s = apply_beam_splitter(normalize(tensor(info, resource)), 0, 1);
  relabel_mode(s, 0, 3);
  relabel_mode(s, 1, 4);
  return s;
}

struct Cv2DvBranchDef {
  CaseLabel label;
  std::vector<std::pair<int, CvProjector>> steps;
  Correction correction;
};

const std::vector<Cv2DvBranchDef>& cv2dv_branches() {
  static const std::vector<Cv2DvBranchDef> defs = {
      {CaseLabel::Cv2Dv_I,
       {{3, CvProjector::Vacuum}, {4, CvProjector::Vacuum}},
       Correction::NoneFailure},
      {CaseLabel::Cv2Dv_II,
       {{3, CvProjector::Even}, {3, CvProjector::NonZero}, {4, CvProjector::Vacuum}},
       Correction::Identity},
      {CaseLabel::Cv2Dv_III,
       {{3, CvProjector::Vacuum}, {4, CvProjector::Even}, {4, CvProjector::NonZero}},
       Correction::PauliX_Dv},
      {CaseLabel::Cv2Dv_IV,
       {{3, CvProjector::Odd}, {4, CvProjector::Vacuum}},
       Correction::PauliZ_Dv},
      {CaseLabel::Cv2Dv_V,
       {{3, CvProjector::Vacuum}, {4, CvProjector::Odd}},
       Correction::PauliY_Dv},
  };
  return defs;
}

SuperState apply_dv_correction(const SuperState& s, int mode, Correction c) {
  switch (c) {
    case Correction::Identity:
    case Correction::NoneFailure: return s;
    case Correction::PauliX_Dv: return apply_dv_unitary(s, mode, kPauliX);
    case Correction::PauliZ_Dv: return apply_dv_unitary(s, mode, kPauliZ);
    case Correction::PauliY_Dv: return apply_dv_unitary(s, mode, kFlipY);
    default: throw std::invalid_argument("cv2dv: CV correction on a DV branch");
  }
}

Eigen::MatrixXcd dv_correction_op(Correction c) {
  switch (c) {
    case Correction::Identity:
    case Correction::NoneFailure: return Eigen::MatrixXcd::Identity(fock::kDvDim, fock::kDvDim);
    case Correction::PauliX_Dv: return fock::dv_unitary_op(kPauliX).mat;
    case Correction::PauliZ_Dv: return fock::dv_unitary_op(kPauliZ).mat;
    case Correction::PauliY_Dv: return fock::dv_unitary_op(kFlipY).mat;
    default: throw std::invalid_argument("cv2dv: CV correction on a DV branch");
  }
}

// Mirrors the run in the truncated number basis and returns per-branch values
// plus the worst state-level deviation against the exact engine.
void crosscheck_cv2dv(const QubitParams& qubit, const ProtocolConfig& config,
                      const SuperState& premeasure_exact, ProtocolReport& report) {
  const double alpha = config.alpha;
  const double m_slot = 2.0 * alpha * alpha;
  const int cutoff = config.cutoff_override.value_or(fock::cutoff_for(m_slot));
  const int dim = cutoff + 1;
  report.engine.cutoffs = {{3, cutoff}, {4, cutoff}};

  const cplx a = qubit.a(), b = qubit.b();
  std::vector<fock::FockMode> modes = {{0, ModeKind::Cv, dim},
                                       {1, ModeKind::Cv, dim},
                                       {2, ModeKind::Dv, fock::kDvDim}};
  const SuperState info = cv_information_state(qubit, alpha, 0);
  const SuperState resource =
      scale(add(tensor(make_cv_state(1, alpha), make_dv_state(2, Occupancy::H)),
                tensor(make_cv_state(1, -alpha), make_dv_state(2, Occupancy::V))),
            cplx(1.0 / std::sqrt(2.0)));
  fock::FockState fs = fock::fock_image(tensor(info, resource), modes);
  fock::normalize(fs);

  const auto bs = fock::beam_splitter_op(dim, dim);
  fock::apply_two_mode(fs, 0, 1, bs.mat);
  relabel_mode(fs, 0, 3);
  relabel_mode(fs, 1, 4);

  double dev = fock::crosscheck(premeasure_exact, fs, config.crosscheck_tol).max_dev;

  const Eigen::VectorXcd ref =
      a * fock::dv_vector(Occupancy::H) + b * fock::dv_vector(Occupancy::V);
  const auto vac = fock::vacuum_projector_op(dim);
  const auto nonzero = fock::nonzero_projector_op(dim);
  const auto even = fock::parity_projector_op(dim, true);
  const auto odd = fock::parity_projector_op(dim, false);
  auto proj_of = [&](CvProjector p) -> const Eigen::MatrixXcd& {
    switch (p) {
      case CvProjector::Vacuum: return vac.mat;
      case CvProjector::NonZero: return nonzero.mat;
      case CvProjector::Even: return even.mat;
      default: return odd.mat;
    }
  };

  for (std::size_t bi = 0; bi < cv2dv_branches().size(); ++bi) {
    const auto& def = cv2dv_branches()[bi];
    fock::FockState branch = fs;
    for (const auto& [mode, proj] : def.steps) fock::apply_one_mode(branch, mode, proj_of(proj));
    const double p = fock::norm_squared(branch);
    double fid = 0.0;
    if (p > kProbabilityFloor) {
      fock::apply_one_mode(branch, 2, dv_correction_op(def.correction));
      fid = fock::fidelity_on_mode(branch, 2, ref);
    }
    report.engine.fock_probabilities.push_back(p);
    report.engine.fock_fidelities.push_back(fid);
    dev = std::max(dev, branch_dev(report.branches[bi].probability, p));
    if (report.branches[bi].probability > kProbabilityFloor && p > kProbabilityFloor)
      dev = std::max(dev, branch_dev(report.branches[bi].fidelity, fid));
  }
  report.engine.crosscheck_run = true;
  report.engine.max_crosscheck_dev = dev;
}

}  // namespace

ProtocolReport run_cv2dv(const QubitParams& qubit, const ProtocolConfig& config) {
  require_direction(config, Direction::Cv2Dv);
  ProtocolReport report;
  report.direction = Direction::Cv2Dv;
  report.alpha2 = config.alpha * config.alpha;
  report.qubit = qubit;
  report.delta = cplx(0.0, 0.0);
  report.x2 = std::exp(-2.0 * report.alpha2);
  report.wiring = {
      {"source_information", {}, {0}},
      {"source_resource", {}, {1, 2}},
      {"beam_splitter", {0, 1}, {3, 4}},
      {"photon_counting", {3, 4}, {}},
      {"dv_correction", {2}, {2}},
  };

  const SuperState s = cv2dv_premeasure(qubit, config);
  const SuperState ref = dv_information_state(qubit, 2);

  for (const auto& def : cv2dv_branches()) {
    BranchOutcome out;
    out.label = def.label;
    out.correction = def.correction;
    Projection proj{s, 1.0};
    for (const auto& [mode, p] : def.steps) proj = project_cv(proj.state, mode, p);
    out.probability = proj.probability;
    if (proj.probability > 0.0) {
      SuperState corrected = apply_dv_correction(proj.state, 2, def.correction);
      out.conditional = normalize(corrected);
      out.fidelity = fidelity_on_mode(out.conditional, 2, ref);
    } else {
      out.conditional = SuperState{proj.state.layout, {}};
    }
    report.f_avg += out.probability * out.fidelity;
    report.branches.push_back(std::move(out));
  }

  const double p0_formula =
      analytics::eval_formula(analytics::FormulaId::P0, qubit.a(), qubit.b(), report.alpha2);
  report.reconciliation.push_back({"p0", p0_formula, report.branches[0].probability,
                                   std::abs(p0_formula - report.branches[0].probability)});

  if (config.with_fock_crosscheck) crosscheck_cv2dv(qubit, config, s, report);
  return report;
}

// ---------------------------------------------------------------------------
// DV -> CV
// ---------------------------------------------------------------------------

namespace {

// Normalized state before Alice's measurements; layout order [8, 11, 2, 12].
SuperState dv2cv_premeasure(const QubitParams& qubit, const ProtocolConfig& config) {
  const double alpha = config.alpha;
  const double x4 = std::exp(-4.0 * alpha * alpha);
  const SuperState info = dv_information_state(qubit, 0);
  const SuperState resource =
      scale(add(tensor(make_cv_state(1, alpha), make_cv_state(2, alpha)),
                scale(tensor(make_cv_state(1, -alpha), make_cv_state(2, -alpha)), cplx(-1.0))),
            cplx(1.0 / std::sqrt(2.0 * (1.0 - x4))));
  SuperState s = normalize(tensor(info, resource));
  s = apply_pbs_split(s, 0, 4, 5);
  s = apply_cross_kerr(s, 1, 5, kPi);
  relabel_mode(s, 1, 6);
  relabel_mode(s, 5, 7);
  s = apply_pbs_merge(s, 4, 7, 8);
  s = tensor(s, make_cv_state(10, alpha));
  s = apply_beam_splitter(s, 6, 10);
  relabel_mode(s, 6, 11);
  relabel_mode(s, 10, 12);
  return s;
}

struct Dv2CvBranchDef {
  CaseLabel label;
  DvOutcome vnm;
  CvProjector det11;
  CvProjector det12;
  Correction correction;
};

const std::vector<Dv2CvBranchDef>& dv2cv_branches() {
  static const std::vector<Dv2CvBranchDef> defs = {
      {CaseLabel::Dv2Cv_I, DvOutcome::Plus, CvProjector::NonZero, CvProjector::Vacuum,
       Correction::Displace_Cv},
      {CaseLabel::Dv2Cv_II, DvOutcome::Minus, CvProjector::NonZero, CvProjector::Vacuum,
       Correction::Identity},
      {CaseLabel::Dv2Cv_III, DvOutcome::Plus, CvProjector::Vacuum, CvProjector::NonZero,
       Correction::DisplaceAfterPhasePi_Cv},
      {CaseLabel::Dv2Cv_IV, DvOutcome::Minus, CvProjector::Vacuum, CvProjector::NonZero,
       Correction::PhasePi_Cv},
      {CaseLabel::Dv2Cv_V, DvOutcome::Plus, CvProjector::Vacuum, CvProjector::Vacuum,
       Correction::NoneFailure},
      {CaseLabel::Dv2Cv_VI, DvOutcome::Minus, CvProjector::Vacuum, CvProjector::Vacuum,
       Correction::NoneFailure},
  };
  return defs;
}

SuperState apply_cv_correction(const SuperState& s, int mode, Correction c, cplx delta) {
  switch (c) {
    case Correction::Identity:
    case Correction::NoneFailure: return s;
    case Correction::PhasePi_Cv: return apply_phase_shift(s, mode, kPi);
    case Correction::Displace_Cv: return apply_displacement(s, mode, delta);
    case Correction::DisplaceAfterPhasePi_Cv:
      return apply_displacement(apply_phase_shift(s, mode, kPi), mode, delta);
    default: throw std::invalid_argument("dv2cv: DV correction on a CV branch");
  }
}

void crosscheck_dv2cv(const QubitParams& qubit, const ProtocolConfig& config,
                      ProtocolReport& report) {
  const double alpha = config.alpha;
  const cplx delta = config.delta();
  const double m_slot = 2.0 * alpha * alpha;
  const double m_bob = (alpha + std::abs(delta)) * (alpha + std::abs(delta));
  const int cut_slot = config.cutoff_override.value_or(fock::cutoff_for(m_slot));
  const int cut_bob = config.cutoff_override.value_or(fock::cutoff_for(m_bob));
  const int dim_slot = cut_slot + 1, dim_bob = cut_bob + 1;
  report.engine.cutoffs = {{11, cut_slot}, {12, cut_slot}, {2, cut_bob}};

  const cplx a = qubit.a(), b = qubit.b();
  const double x4 = std::exp(-4.0 * alpha * alpha);
  const double tol = config.crosscheck_tol;

  std::vector<fock::FockMode> modes = {{0, ModeKind::Dv, fock::kDvDim},
                                       {1, ModeKind::Cv, dim_slot},
                                       {2, ModeKind::Cv, dim_bob}};
  const SuperState info = dv_information_state(qubit, 0);
  const SuperState resource =
      scale(add(tensor(make_cv_state(1, alpha), make_cv_state(2, alpha)),
                scale(tensor(make_cv_state(1, -alpha), make_cv_state(2, -alpha)), cplx(-1.0))),
            cplx(1.0 / std::sqrt(2.0 * (1.0 - x4))));
  fock::FockState fs = fock::fock_image(tensor(info, resource), modes);
  fock::normalize(fs);

  // Exact twin evolved in lockstep for the stepwise state comparison.
  SuperState es = normalize(tensor(info, resource));
  double dev = fock::crosscheck(es, fs, tol).max_dev;

  fs = fock::pbs_split(fs, 0, 4, 5);
  es = apply_pbs_split(es, 0, 4, 5);

  const auto ck = fock::cross_kerr_op(dim_slot, ModeKind::Dv, fock::kDvDim, kPi);
  fock::apply_two_mode(fs, 1, 5, ck.mat);
  relabel_mode(fs, 1, 6);
  relabel_mode(fs, 5, 7);
  es = apply_cross_kerr(es, 1, 5, kPi);
  relabel_mode(es, 1, 6);
  relabel_mode(es, 5, 7);
  dev = std::max(dev, fock::crosscheck(es, fs, tol).max_dev);

  fs = fock::pbs_merge(fs, 4, 7, 8);
  es = apply_pbs_merge(es, 4, 7, 8);
  dev = std::max(dev, fock::crosscheck(es, fs, tol).max_dev);

  fs = fock::tensor_extend(fs, {10, ModeKind::Cv, dim_slot}, fock::coherent_vector(alpha, cut_slot));
  es = tensor(es, make_cv_state(10, alpha));

  const auto bs = fock::beam_splitter_op(dim_slot, dim_slot);
  fock::apply_two_mode(fs, 6, 10, bs.mat);
  relabel_mode(fs, 6, 11);
  relabel_mode(fs, 10, 12);
  es = apply_beam_splitter(es, 6, 10);
  relabel_mode(es, 6, 11);
  relabel_mode(es, 10, 12);
  dev = std::max(dev, fock::crosscheck(es, fs, tol).max_dev);

  const Eigen::VectorXcd ref = a * fock::coherent_vector(alpha, cut_bob) +
                               b * fock::coherent_vector(-alpha, cut_bob);
  const auto vac11 = fock::vacuum_projector_op(dim_slot);
  const auto nz11 = fock::nonzero_projector_op(dim_slot);

  for (std::size_t bi = 0; bi < dv2cv_branches().size(); ++bi) {
    const auto& def = dv2cv_branches()[bi];
    fock::FockState branch = fs;
    fock::apply_one_mode(branch, 8, fock::dv_pm_projector_op(def.vnm).mat);
    fock::apply_one_mode(branch, 11,
                         def.det11 == CvProjector::Vacuum ? vac11.mat : nz11.mat);
    fock::apply_one_mode(branch, 12,
                         def.det12 == CvProjector::Vacuum ? vac11.mat : nz11.mat);
    const double p = fock::norm_squared(branch);
    double fid = 0.0;
    if (p > kProbabilityFloor) {
      switch (def.correction) {
        case Correction::PhasePi_Cv:
          fock::apply_one_mode(branch, 2, fock::phase_shift_op(kPi, dim_bob).mat);
          break;
        case Correction::Displace_Cv:
          fock::apply_one_mode(branch, 2, fock::displacement_op(delta, dim_bob).mat);
          break;
        case Correction::DisplaceAfterPhasePi_Cv:
          fock::apply_one_mode(branch, 2, fock::phase_shift_op(kPi, dim_bob).mat);
          fock::apply_one_mode(branch, 2, fock::displacement_op(delta, dim_bob).mat);
          break;
        default: break;
      }
      fid = fock::fidelity_on_mode(branch, 2, ref);
    }
    report.engine.fock_probabilities.push_back(p);
    report.engine.fock_fidelities.push_back(fid);
    dev = std::max(dev, branch_dev(report.branches[bi].probability, p));
    if (report.branches[bi].probability > kProbabilityFloor && p > kProbabilityFloor)
      dev = std::max(dev, branch_dev(report.branches[bi].fidelity, fid));
  }
  report.engine.crosscheck_run = true;
  report.engine.max_crosscheck_dev = dev;
}

}  // namespace

ProtocolReport run_dv2cv(const QubitParams& qubit, const ProtocolConfig& config) {
  require_direction(config, Direction::Dv2Cv);
  ProtocolReport report;
  report.direction = Direction::Dv2Cv;
  report.alpha2 = config.alpha * config.alpha;
  report.qubit = qubit;
  report.delta = config.delta();
  report.x2 = std::exp(-2.0 * report.alpha2);
  report.wiring = {
      {"source_information", {}, {0}},
      {"source_resource", {}, {1, 2}},
      {"pbs_split", {0}, {4, 5}},
      {"cross_kerr", {1, 5}, {6, 7}},
      {"pbs_merge", {4, 7}, {8, 9}},
      {"drop_vacuum", {9}, {}},
      {"aux_coherent", {}, {10}},
      {"beam_splitter", {6, 10}, {11, 12}},
      {"vnm", {8}, {}},
      {"photon_detection", {11, 12}, {}},
      {"cv_correction", {2}, {2}},
  };

  const SuperState s = dv2cv_premeasure(qubit, config);
  const SuperState ref = cv_information_state(qubit, config.alpha, 2);
  const cplx delta = config.delta();

  for (const auto& def : dv2cv_branches()) {
    BranchOutcome out;
    out.label = def.label;
    out.correction = def.correction;
    Projection proj = project_dv(s, 8, DvBasis::PlusMinus, def.vnm);
    proj = project_cv(proj.state, 11, def.det11);
    proj = project_cv(proj.state, 12, def.det12);
    out.probability = proj.probability;
    if (proj.probability > 0.0) {
      SuperState corrected = apply_cv_correction(proj.state, 2, def.correction, delta);
      out.conditional = normalize(corrected);
      out.fidelity = fidelity_on_mode(out.conditional, 2, ref);
    } else {
      out.conditional = SuperState{proj.state.layout, {}};
    }
    report.f_avg += out.probability * out.fidelity;
    report.branches.push_back(std::move(out));
  }

  using analytics::FormulaId;
  const cplx a = qubit.a(), b = qubit.b();
  const double a2 = report.alpha2;
  auto rec = [&](FormulaId id, double oracle) {
    const double v = analytics::eval_formula(id, a, b, a2);
    report.reconciliation.push_back({analytics::to_string(id), v, oracle, std::abs(v - oracle)});
  };
  rec(FormulaId::Eq16_Pi, report.branches[0].probability);
  rec(FormulaId::Eq17_Pii, report.branches[1].probability);
  rec(FormulaId::Eq18_Pv_printed, report.branches[4].probability);
  rec(FormulaId::Eq18_Pv_consistent, report.branches[4].probability);
  rec(FormulaId::Eq18_Pvi_printed, report.branches[5].probability);
  rec(FormulaId::Eq18_Pvi_consistent, report.branches[5].probability);
  rec(FormulaId::Eq14_F, report.branches[0].fidelity);
  rec(FormulaId::F0, report.branches[4].fidelity);
  rec(FormulaId::Eq19_Favg, report.f_avg);
  rec(FormulaId::Eq20_Favg, report.f_avg);

  if (config.with_fock_crosscheck) crosscheck_dv2cv(qubit, config, report);
  return report;
}

// ---------------------------------------------------------------------------
// Monte Carlo
// ---------------------------------------------------------------------------

namespace {

// Inverse-CDF walk over a weight vector; weights need not be normalized.
std::size_t sample_index(const std::vector<double>& w, double total, double u) {
  double cum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    cum += w[i];
    if (u * total < cum) return i;
  }
  return w.size() - 1;
}

struct JointSampler {
  int n_rows = 0, n_cols = 0;
  std::vector<double> joint;  // row-major
  std::vector<double> row_sum;
  double total = 0.0;

  void init(const SuperState& s, int mode_u, int mode_v, int n_u, int n_v) {
    n_rows = n_u + 1;
    n_cols = n_v + 1;
    joint = joint_photon_distribution(s, mode_u, mode_v, n_u, n_v);
    row_sum.assign(n_rows, 0.0);
    for (int r = 0; r < n_rows; ++r)
      for (int c = 0; c < n_cols; ++c) row_sum[r] += joint[std::size_t(r) * n_cols + c];
    total = 0.0;
    for (double v : row_sum) total += v;
  }

  std::pair<int, int> draw(std::mt19937_64& rng) const {
    const int r = static_cast<int>(sample_index(row_sum, total, uniform01(rng)));
    std::vector<double> row(joint.begin() + std::size_t(r) * n_cols,
                            joint.begin() + std::size_t(r + 1) * n_cols);
    const int c = static_cast<int>(sample_index(row, row_sum[r], uniform01(rng)));
    return {r, c};
  }
};

CaseLabel classify_cv2dv(int n3, int n4) {
  if (n3 == 0 && n4 == 0) return CaseLabel::Cv2Dv_I;
  if (n4 == 0) return n3 % 2 == 0 ? CaseLabel::Cv2Dv_II : CaseLabel::Cv2Dv_IV;
  if (n3 == 0) return n4 % 2 == 0 ? CaseLabel::Cv2Dv_III : CaseLabel::Cv2Dv_V;
  throw std::logic_error("cv2dv sampling: both counters fired on a zero-weight outcome");
}

CaseLabel classify_dv2cv(DvOutcome vnm, int n11, int n12) {
  const bool plus = vnm == DvOutcome::Plus;
  if (n11 > 0 && n12 == 0) return plus ? CaseLabel::Dv2Cv_I : CaseLabel::Dv2Cv_II;
  if (n11 == 0 && n12 > 0) return plus ? CaseLabel::Dv2Cv_III : CaseLabel::Dv2Cv_IV;
  if (n11 == 0 && n12 == 0) return plus ? CaseLabel::Dv2Cv_V : CaseLabel::Dv2Cv_VI;
  throw std::logic_error("dv2cv sampling: both detectors fired on a zero-weight outcome");
}

}  // namespace

MonteCarloReport run_monte_carlo(const QubitParams& qubit, const ProtocolConfig& config,
                                 std::uint64_t trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("run_monte_carlo: trials must be >= 1");
  ProtocolConfig exact_cfg = config;
  exact_cfg.with_fock_crosscheck = false;
  const ProtocolReport exact = config.direction == Direction::Cv2Dv
                                   ? run_cv2dv(qubit, exact_cfg)
                                   : run_dv2cv(qubit, exact_cfg);

  MonteCarloReport mc;
  mc.direction = config.direction;
  mc.alpha2 = exact.alpha2;
  mc.qubit = qubit;
  mc.trials = trials;
  mc.seed = seed;
  mc.exact_f_avg = exact.f_avg;
  for (const auto& b : exact.branches)
    mc.branches.push_back({b.label, 0, 0.0, b.probability, b.fidelity});

  auto stat_of = [&](CaseLabel label) -> BranchStat& {
    for (auto& s : mc.branches)
      if (s.label == label) return s;
    throw std::logic_error("run_monte_carlo: sampled an unknown branch");
  };

  std::mt19937_64 rng = make_rng_stream(seed, 0);
  const int n_max = fock::cutoff_for(2.0 * config.alpha * config.alpha);

  if (config.direction == Direction::Cv2Dv) {
    const SuperState s = cv2dv_premeasure(qubit, config);
    JointSampler sampler;
    sampler.init(s, 3, 4, n_max, n_max);
    for (std::uint64_t t = 0; t < trials; ++t) {
      const auto [n3, n4] = sampler.draw(rng);
      ++stat_of(classify_cv2dv(n3, n4)).count;
    }
  } else {
    const SuperState s = dv2cv_premeasure(qubit, config);
    const Projection plus = project_dv(s, 8, DvBasis::PlusMinus, DvOutcome::Plus);
    const Projection minus = project_dv(s, 8, DvBasis::PlusMinus, DvOutcome::Minus);
    JointSampler samplers[2];
    if (plus.probability > 0.0) samplers[0].init(normalize(plus.state), 11, 12, n_max, n_max);
    if (minus.probability > 0.0) samplers[1].init(normalize(minus.state), 11, 12, n_max, n_max);
    for (std::uint64_t t = 0; t < trials; ++t) {
      const bool is_plus = uniform01(rng) < plus.probability;
      const auto& sampler = samplers[is_plus ? 0 : 1];
      const auto [n11, n12] = sampler.draw(rng);
      ++stat_of(classify_dv2cv(is_plus ? DvOutcome::Plus : DvOutcome::Minus, n11, n12)).count;
    }
  }

  for (auto& b : mc.branches) {
    b.frequency = static_cast<double>(b.count) / static_cast<double>(trials);
    mc.mean_fidelity += b.frequency * b.fidelity;
  }
  return mc;
}

}  // namespace hqt
