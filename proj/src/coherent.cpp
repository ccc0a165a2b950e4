#include "hqt/coherent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hqt {

namespace {

const CvSlot& cv(const Slot& s) { return std::get<CvSlot>(s); }
const DvSlot& dv(const Slot& s) { return std::get<DvSlot>(s); }

bool slots_equal(const Slot& a, const Slot& b) {
  if (a.index() != b.index()) return false;
  if (std::holds_alternative<CvSlot>(a)) {
    const cplx da = cv(a).alpha - cv(b).alpha;
    return std::abs(da.real()) <= kMergeTol && std::abs(da.imag()) <= kMergeTol;
  }
  return dv(a).occ == dv(b).occ;
}

// <a|b> for a single slot pair of equal kind.
cplx slot_overlap(const Slot& a, const Slot& b) {
  if (std::holds_alternative<CvSlot>(a)) {
    const cplx za = cv(a).alpha;
    const cplx zb = cv(b).alpha;
    return std::exp(-0.5 * (std::norm(za) + std::norm(zb)) + std::conj(za) * zb);
  }
  return dv(a).occ == dv(b).occ ? cplx(1.0) : cplx(0.0);
}

void require_same_layout(const SuperState& s1, const SuperState& s2) {
  if (s1.layout.size() != s2.layout.size())
    throw std::invalid_argument("coherent: layout mismatch (mode count)");
  for (std::size_t i = 0; i < s1.layout.size(); ++i) {
    if (s1.layout[i].id != s2.layout[i].id || s1.layout[i].kind != s2.layout[i].kind)
      throw std::invalid_argument("coherent: layout mismatch at slot " + std::to_string(i));
  }
}

std::size_t require_mode(const SuperState& s, int mode_id, ModeKind kind, const char* op) {
  const std::size_t idx = s.mode_index(mode_id);
  if (s.layout[idx].kind != kind)
    throw std::invalid_argument(std::string(op) + ": mode " + std::to_string(mode_id) +
                                " has the wrong kind");
  return idx;
}

}  // namespace

int photon_count(Occupancy occ) { return occ == Occupancy::Vac ? 0 : 1; }

std::string to_string(Occupancy occ) {
  switch (occ) {
    case Occupancy::Vac: return "Vac";
    case Occupancy::H: return "H";
    case Occupancy::V: return "V";
  }
  return "?";
}

std::size_t SuperState::mode_index(int mode_id) const {
  for (std::size_t i = 0; i < layout.size(); ++i)
    if (layout[i].id == mode_id) return i;
  throw std::invalid_argument("coherent: unknown mode id " + std::to_string(mode_id));
}

ModeKind SuperState::kind_at(int mode_id) const { return layout[mode_index(mode_id)].kind; }

bool SuperState::has_mode(int mode_id) const {
  for (const auto& m : layout)
    if (m.id == mode_id) return true;
  return false;
}

SuperState make_cv_state(int mode_id, cplx alpha) {
  SuperState s;
  s.layout = {ModeSpec{mode_id, ModeKind::Cv}};
  s.terms = {Term{cplx(1.0), {CvSlot{alpha}}}};
  return s;
}

SuperState make_dv_state(int mode_id, Occupancy occ) {
  SuperState s;
  s.layout = {ModeSpec{mode_id, ModeKind::Dv}};
  s.terms = {Term{cplx(1.0), {DvSlot{occ}}}};
  return s;
}

SuperState tensor(const SuperState& a, const SuperState& b) {
  SuperState out;
  out.layout = a.layout;
  for (const auto& m : b.layout) {
    if (out.has_mode(m.id))
      throw std::invalid_argument("tensor: duplicate mode id " + std::to_string(m.id));
    out.layout.push_back(m);
  }
  out.terms.reserve(a.terms.size() * b.terms.size());
  for (const auto& ta : a.terms)
    for (const auto& tb : b.terms) {
      Term t;
      t.coeff = ta.coeff * tb.coeff;
      t.slots = ta.slots;
      t.slots.insert(t.slots.end(), tb.slots.begin(), tb.slots.end());
      out.terms.push_back(std::move(t));
    }
  canonicalize(out);
  return out;
}

SuperState scale(const SuperState& s, cplx factor) {
  SuperState out = s;
  for (auto& t : out.terms) t.coeff *= factor;
  canonicalize(out);
  return out;
}

SuperState add(const SuperState& a, const SuperState& b) {
  require_same_layout(a, b);
  SuperState out = a;
  out.terms.insert(out.terms.end(), b.terms.begin(), b.terms.end());
  canonicalize(out);
  return out;
}

void canonicalize(SuperState& s) {
  std::vector<Term> merged;
  merged.reserve(s.terms.size());
  for (auto& t : s.terms) {
    bool found = false;
    for (auto& m : merged) {
      bool same = m.slots.size() == t.slots.size();
      for (std::size_t i = 0; same && i < m.slots.size(); ++i)
        same = slots_equal(m.slots[i], t.slots[i]);
      if (same) {
        m.coeff += t.coeff;
        found = true;
        break;
      }
    }
    if (!found) merged.push_back(std::move(t));
  }
  s.terms.clear();
  for (auto& m : merged)
    if (std::abs(m.coeff) > kCoeffPruneTol) s.terms.push_back(std::move(m));
}

cplx inner_product(const SuperState& s1, const SuperState& s2) {
  require_same_layout(s1, s2);
  cplx acc(0.0);
  for (const auto& t1 : s1.terms)
    for (const auto& t2 : s2.terms) {
      cplx ov = std::conj(t1.coeff) * t2.coeff;
      for (std::size_t i = 0; i < t1.slots.size() && ov != cplx(0.0); ++i)
        ov *= slot_overlap(t1.slots[i], t2.slots[i]);
      acc += ov;
    }
  return acc;
}

double norm_squared(const SuperState& s) { return std::max(0.0, inner_product(s, s).real()); }

SuperState normalize(const SuperState& s) {
  const double n2 = norm_squared(s);
  if (n2 <= kProbabilityFloor)
    throw std::domain_error("normalize: degenerate state with vanishing norm");
  return scale(s, cplx(1.0 / std::sqrt(n2)));
}

SuperState apply_beam_splitter(const SuperState& s, int mode_u, int mode_v) {
  const std::size_t iu = require_mode(s, mode_u, ModeKind::Cv, "beam_splitter");
  const std::size_t iv = require_mode(s, mode_v, ModeKind::Cv, "beam_splitter");
  static const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  SuperState out = s;
  for (auto& t : out.terms) {
    const cplx a = cv(t.slots[iu]).alpha;
    const cplx b = cv(t.slots[iv]).alpha;
    t.slots[iu] = CvSlot{(a + b) * inv_sqrt2};
    t.slots[iv] = CvSlot{(a - b) * inv_sqrt2};
  }
  canonicalize(out);
  return out;
}

SuperState apply_pbs_split(const SuperState& s, int in_mode, int out_t, int out_r) {
  const std::size_t ii = require_mode(s, in_mode, ModeKind::Dv, "pbs_split");
  if (s.has_mode(out_t) || s.has_mode(out_r) || out_t == out_r)
    throw std::invalid_argument("pbs_split: output modes must be fresh");
  SuperState out;
  out.layout = s.layout;
  out.layout[ii] = ModeSpec{out_t, ModeKind::Dv};
  out.layout.insert(out.layout.begin() + ii + 1, ModeSpec{out_r, ModeKind::Dv});
  out.terms.reserve(s.terms.size());
  for (const auto& t : s.terms) {
    Term nt;
    nt.coeff = t.coeff;
    nt.slots = t.slots;
    const Occupancy occ = dv(t.slots[ii]).occ;
    nt.slots[ii] = DvSlot{occ == Occupancy::H ? Occupancy::H : Occupancy::Vac};
    nt.slots.insert(nt.slots.begin() + ii + 1,
                    DvSlot{occ == Occupancy::V ? Occupancy::V : Occupancy::Vac});
    out.terms.push_back(std::move(nt));
  }
  canonicalize(out);
  return out;
}

SuperState apply_pbs_merge(const SuperState& s, int in_t, int in_r, int out_mode) {
  const std::size_t it = require_mode(s, in_t, ModeKind::Dv, "pbs_merge");
  const std::size_t ir = require_mode(s, in_r, ModeKind::Dv, "pbs_merge");
  if (s.has_mode(out_mode) && out_mode != in_t && out_mode != in_r)
    throw std::invalid_argument("pbs_merge: output mode id already in use");
  SuperState out;
  out.layout = s.layout;
  out.layout[it] = ModeSpec{out_mode, ModeKind::Dv};
  out.layout.erase(out.layout.begin() + ir);
  out.terms.reserve(s.terms.size());
  for (const auto& t : s.terms) {
    const Occupancy a = dv(t.slots[it]).occ;
    const Occupancy b = dv(t.slots[ir]).occ;
    Occupancy occ;
    if (a == Occupancy::H && b == Occupancy::Vac) {
      occ = Occupancy::H;
    } else if (a == Occupancy::Vac && b == Occupancy::V) {
      occ = Occupancy::V;
    } else if (a == Occupancy::Vac && b == Occupancy::Vac) {
      occ = Occupancy::Vac;
    } else {
      throw std::domain_error("pbs_merge: arm configuration (" + to_string(a) + "," +
                              to_string(b) + ") would exceed one photon per mode");
    }
    Term nt;
    nt.coeff = t.coeff;
    nt.slots = t.slots;
    nt.slots[it] = DvSlot{occ};
    nt.slots.erase(nt.slots.begin() + ir);
    out.terms.push_back(std::move(nt));
  }
  canonicalize(out);
  return out;
}

SuperState apply_cross_kerr(const SuperState& s, int cv_mode, int fock_arm, double theta) {
  const std::size_t ic = require_mode(s, cv_mode, ModeKind::Cv, "cross_kerr");
  const std::size_t id = require_mode(s, fock_arm, ModeKind::Dv, "cross_kerr");
  SuperState out = s;
  for (auto& t : out.terms) {
    const int n = photon_count(dv(t.slots[id]).occ);
    if (n != 0) {
      const cplx phase = std::polar(1.0, -n * theta);
      t.slots[ic] = CvSlot{cv(t.slots[ic]).alpha * phase};
    }
  }
  canonicalize(out);
  return out;
}

SuperState apply_displacement(const SuperState& s, int cv_mode, cplx delta) {
  const std::size_t ic = require_mode(s, cv_mode, ModeKind::Cv, "displacement");
  SuperState out = s;
  for (auto& t : out.terms) {
    const cplx a = cv(t.slots[ic]).alpha;
    t.coeff *= std::exp(0.5 * (delta * std::conj(a) - std::conj(delta) * a));
    t.slots[ic] = CvSlot{a + delta};
  }
  canonicalize(out);
  return out;
}

SuperState apply_phase_shift(const SuperState& s, int cv_mode, double phi) {
  const std::size_t ic = require_mode(s, cv_mode, ModeKind::Cv, "phase_shift");
  const cplx phase = std::polar(1.0, phi);
  SuperState out = s;
  for (auto& t : out.terms) t.slots[ic] = CvSlot{cv(t.slots[ic]).alpha * phase};
  canonicalize(out);
  return out;
}

SuperState apply_dv_unitary(const SuperState& s, int dv_mode,
                            const std::array<std::array<cplx, 2>, 2>& u) {
  const std::size_t id = require_mode(s, dv_mode, ModeKind::Dv, "dv_unitary");
  SuperState out;
  out.layout = s.layout;
  for (const auto& t : s.terms) {
    const Occupancy occ = dv(t.slots[id]).occ;
    if (occ == Occupancy::Vac) {
      out.terms.push_back(t);
      continue;
    }
    const int col = occ == Occupancy::H ? 0 : 1;
    for (int row = 0; row < 2; ++row) {
      if (u[row][col] == cplx(0.0)) continue;
      Term nt = t;
      nt.coeff *= u[row][col];
      nt.slots[id] = DvSlot{row == 0 ? Occupancy::H : Occupancy::V};
      out.terms.push_back(std::move(nt));
    }
  }
  canonicalize(out);
  return out;
}

Projection project_cv(const SuperState& s, int cv_mode, CvProjector which) {
  const std::size_t ic = require_mode(s, cv_mode, ModeKind::Cv, "project_cv");
  SuperState out;
  out.layout = s.layout;
  for (const auto& t : s.terms) {
    const cplx a = cv(t.slots[ic]).alpha;
    switch (which) {
      case CvProjector::Vacuum: {
        Term nt = t;
        nt.coeff *= std::exp(-0.5 * std::norm(a));  // <0|a>
        nt.slots[ic] = CvSlot{cplx(0.0)};
        out.terms.push_back(std::move(nt));
        break;
      }
      case CvProjector::NonZero: {
        out.terms.push_back(t);
        Term nt = t;
        nt.coeff *= -std::exp(-0.5 * std::norm(a));
        nt.slots[ic] = CvSlot{cplx(0.0)};
        out.terms.push_back(std::move(nt));
        break;
      }
      case CvProjector::Even:
      case CvProjector::Odd: {
        Term plus = t;
        plus.coeff *= 0.5;
        out.terms.push_back(std::move(plus));
        Term minus = t;
        minus.coeff *= which == CvProjector::Even ? 0.5 : -0.5;
        minus.slots[ic] = CvSlot{-a};
        out.terms.push_back(std::move(minus));
        break;
      }
    }
  }
  canonicalize(out);
  const double p = norm_squared(out);
  if (p <= kProbabilityFloor) return Projection{SuperState{out.layout, {}}, 0.0};
  return Projection{std::move(out), p};
}

Projection project_dv(const SuperState& s, int dv_mode, DvBasis basis, DvOutcome outcome) {
  const std::size_t id = require_mode(s, dv_mode, ModeKind::Dv, "project_dv");
  if (basis == DvBasis::HV && outcome != DvOutcome::H && outcome != DvOutcome::V)
    throw std::invalid_argument("project_dv: outcome not in the HV basis");
  if (basis == DvBasis::PlusMinus && outcome != DvOutcome::Plus && outcome != DvOutcome::Minus)
    throw std::invalid_argument("project_dv: outcome not in the +/- basis");
  SuperState out;
  out.layout = s.layout;
  for (const auto& t : s.terms) {
    const Occupancy occ = dv(t.slots[id]).occ;
    if (occ == Occupancy::Vac) continue;
    if (basis == DvBasis::HV) {
      if ((outcome == DvOutcome::H) == (occ == Occupancy::H)) out.terms.push_back(t);
      continue;
    }
    // |+-><+-| applied to |H> or |V>: two terms with weight 1/2 each.
    const double sign_in = (outcome == DvOutcome::Minus && occ == Occupancy::V) ? -1.0 : 1.0;
    Term h = t;
    h.coeff *= 0.5 * sign_in;
    h.slots[id] = DvSlot{Occupancy::H};
    out.terms.push_back(std::move(h));
    Term v = t;
    v.coeff *= 0.5 * sign_in * (outcome == DvOutcome::Minus ? -1.0 : 1.0);
    v.slots[id] = DvSlot{Occupancy::V};
    out.terms.push_back(std::move(v));
  }
  canonicalize(out);
  const double p = norm_squared(out);
  if (p <= kProbabilityFloor) return Projection{SuperState{out.layout, {}}, 0.0};
  return Projection{std::move(out), p};
}

namespace {

// Gram factor over all slots except `skip`: prod_i <t1_i|t2_i>.
cplx rest_overlap(const Term& t1, const Term& t2, std::size_t skip) {
  cplx ov(1.0);
  for (std::size_t i = 0; i < t1.slots.size() && ov != cplx(0.0); ++i) {
    if (i == skip) continue;
    ov *= slot_overlap(t1.slots[i], t2.slots[i]);
  }
  return ov;
}

}  // namespace

std::vector<double> photon_number_distribution(const SuperState& s, int cv_mode, int n_max) {
  const std::size_t ic = require_mode(s, cv_mode, ModeKind::Cv, "photon_number_distribution");
  std::vector<double> p(static_cast<std::size_t>(n_max) + 1, 0.0);
  for (const auto& t1 : s.terms)
    for (const auto& t2 : s.terms) {
      const cplx a1 = cv(t1.slots[ic]).alpha;
      const cplx a2 = cv(t2.slots[ic]).alpha;
      cplx w = std::conj(t1.coeff) * t2.coeff * rest_overlap(t1, t2, ic) *
               std::exp(-0.5 * (std::norm(a1) + std::norm(a2)));
      const cplx z = std::conj(a1) * a2;
      p[0] += w.real();
      for (int n = 1; n <= n_max; ++n) {
        w *= z / static_cast<double>(n);
        p[n] += w.real();
      }
    }
  for (auto& v : p) v = std::max(0.0, v);
  return p;
}

std::vector<double> joint_photon_distribution(const SuperState& s, int mode_u, int mode_v,
                                              int n_u, int n_v) {
  const std::size_t iu = require_mode(s, mode_u, ModeKind::Cv, "joint_photon_distribution");
  const std::size_t iv = require_mode(s, mode_v, ModeKind::Cv, "joint_photon_distribution");
  std::vector<double> p(static_cast<std::size_t>(n_u + 1) * (n_v + 1), 0.0);
  std::vector<cplx> pow_u(n_u + 1);
  for (const auto& t1 : s.terms)
    for (const auto& t2 : s.terms) {
      const cplx u1 = cv(t1.slots[iu]).alpha, u2 = cv(t2.slots[iu]).alpha;
      const cplx v1 = cv(t1.slots[iv]).alpha, v2 = cv(t2.slots[iv]).alpha;
      cplx base = std::conj(t1.coeff) * t2.coeff;
      for (std::size_t i = 0; i < t1.slots.size(); ++i)
        if (i != iu && i != iv) base *= slot_overlap(t1.slots[i], t2.slots[i]);
      if (base == cplx(0.0)) continue;
      base *= std::exp(-0.5 * (std::norm(u1) + std::norm(u2) + std::norm(v1) + std::norm(v2)));
      const cplx zu = std::conj(u1) * u2;
      const cplx zv = std::conj(v1) * v2;
      pow_u[0] = base;
      for (int n = 1; n <= n_u; ++n) pow_u[n] = pow_u[n - 1] * zu / static_cast<double>(n);
      for (int n = 0; n <= n_u; ++n) {
        cplx w = pow_u[n];
        p[static_cast<std::size_t>(n) * (n_v + 1)] += w.real();
        for (int m = 1; m <= n_v; ++m) {
          w *= zv / static_cast<double>(m);
          p[static_cast<std::size_t>(n) * (n_v + 1) + m] += w.real();
        }
      }
    }
  for (auto& v : p) v = std::max(0.0, v);
  return p;
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int sample_photon_count(const SuperState& s, int cv_mode, std::mt19937_64& rng) {
  const std::size_t ic = require_mode(s, cv_mode, ModeKind::Cv, "sample_photon_count");
  double m = 0.0;
  for (const auto& t : s.terms) m = std::max(m, std::norm(cv(t.slots[ic]).alpha));
  const int n_max = static_cast<int>(std::ceil(m + 8.0 * std::sqrt(m) + 10.0));
  const auto p = photon_number_distribution(s, cv_mode, n_max);
  const double u = uniform01(rng);
  double cum = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    cum += p[n];
    if (u < cum) return n;
  }
  return n_max;
}

double fidelity_on_mode(const SuperState& s, int mode_id, const SuperState& ref) {
  const std::size_t im = s.mode_index(mode_id);
  if (ref.layout.size() != 1 || ref.layout[0].kind != s.layout[im].kind)
    throw std::invalid_argument("fidelity_on_mode: reference must be a single mode of equal kind");
  // Contract <ref| against the slot, leaving a state on the remaining modes.
  SuperState rest;
  rest.layout = s.layout;
  rest.layout.erase(rest.layout.begin() + im);
  for (const auto& t : s.terms) {
    cplx w(0.0);
    for (const auto& r : ref.terms) w += std::conj(r.coeff) * slot_overlap(r.slots[0], t.slots[im]);
    if (w == cplx(0.0)) continue;
    Term nt;
    nt.coeff = t.coeff * w;
    nt.slots = t.slots;
    nt.slots.erase(nt.slots.begin() + im);
    rest.terms.push_back(std::move(nt));
  }
  canonicalize(rest);
  const double denom = norm_squared(s) * norm_squared(ref);
  if (denom <= kProbabilityFloor)
    throw std::domain_error("fidelity_on_mode: degenerate state or reference");
  return norm_squared(rest) / denom;
}

}  // namespace hqt
