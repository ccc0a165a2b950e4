#include "hqt/fock.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <stdexcept>

namespace hqt::fock {

namespace {

int dv_photons(int index) { return index == 0 ? 0 : 1; }

void check_element_dim(std::size_t dim) {
  if (dim > static_cast<std::size_t>(kMaxElementDim))
    throw std::runtime_error("fock: element dimension " + std::to_string(dim) +
                             " exceeds the overflow guard");
}

std::size_t stride_of(const std::vector<FockMode>& modes, std::size_t pos) {
  std::size_t stride = 1;
  for (std::size_t i = modes.size(); i-- > pos + 1;) stride *= modes[i].dim;
  return stride;
}

}  // namespace

int cutoff_for(double max_mean_photons) {
  const double m = std::max(0.0, max_mean_photons);
  return static_cast<int>(std::ceil(m + 8.0 * std::sqrt(m) + 10.0));
}

std::size_t FockState::total_dim() const {
  std::size_t d = 1;
  for (const auto& m : modes) d *= m.dim;
  return d;
}

std::size_t FockState::mode_pos(int mode_id) const {
  for (std::size_t i = 0; i < modes.size(); ++i)
    if (modes[i].id == mode_id) return i;
  throw std::invalid_argument("fock: unknown mode id " + std::to_string(mode_id));
}

bool FockState::has_mode(int mode_id) const {
  for (const auto& m : modes)
    if (m.id == mode_id) return true;
  return false;
}

Eigen::VectorXcd coherent_vector(cplx alpha, int cutoff) {
  if (cutoff < 0) throw std::invalid_argument("coherent_vector: negative cutoff");
  Eigen::VectorXcd c(cutoff + 1);
  c(0) = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n <= cutoff; ++n) c(n) = c(n - 1) * alpha / std::sqrt(double(n));
  const double leakage = std::abs(1.0 - c.squaredNorm());
  if (leakage > kLeakageTol)
    throw std::runtime_error("coherent_vector: truncation leakage " + std::to_string(leakage) +
                             " at cutoff " + std::to_string(cutoff));
  return c;
}

Eigen::VectorXcd dv_vector(Occupancy occ) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(kDvDim);
  v(static_cast<int>(occ)) = 1.0;
  return v;
}

FockOperator displacement_op(cplx delta, int dim) {
  check_element_dim(dim);
  Eigen::MatrixXcd gen = Eigen::MatrixXcd::Zero(dim, dim);
  for (int n = 0; n < dim - 1; ++n) {
    const double r = std::sqrt(double(n + 1));
    gen(n + 1, n) += delta * r;             // delta a^+
    gen(n, n + 1) -= std::conj(delta) * r;  // -conj(delta) a
  }
  return FockOperator{ElementTag::Displacement, gen.exp()};
}

FockOperator phase_shift_op(double phi, int dim) {
  check_element_dim(dim);
  Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) mat(n, n) = std::polar(1.0, phi * n);
  return FockOperator{ElementTag::PhaseShift, mat};
}

FockOperator beam_splitter_op(int dim_u, int dim_v) {
  check_element_dim(std::size_t(dim_u) * dim_v);
  const double theta = M_PI / 4.0;
  Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(std::size_t(dim_u) * dim_v,
                                                std::size_t(dim_u) * dim_v);
  // theta (a^+ b - b^+ a) conserves total photon number; exponentiate sector
  // by sector, then append the pi phase on mode v.
  for (int total = 0; total <= dim_u + dim_v - 2; ++total) {
    const int k_lo = std::max(0, total - (dim_v - 1));
    const int k_hi = std::min(dim_u - 1, total);
    const int len = k_hi - k_lo + 1;
    if (len <= 0) continue;
    Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(len, len);
    for (int r = 0; r + 1 < len; ++r) {
      const int k = k_lo + r;
      const double c = theta * std::sqrt(double(k + 1) * double(total - k));
      gen(r + 1, r) = c;
      gen(r, r + 1) = -c;
    }
    const Eigen::MatrixXd block = gen.exp();
    for (int r = 0; r < len; ++r)
      for (int c = 0; c < len; ++c) {
        const int ku = k_lo + r, kc = k_lo + c;
        const std::size_t row = std::size_t(ku) * dim_v + (total - ku);
        const std::size_t col = std::size_t(kc) * dim_v + (total - kc);
        const double sign = ((total - ku) % 2 == 0) ? 1.0 : -1.0;  // exp(i pi n_v)
        mat(row, col) = sign * block(r, c);
      }
  }
  return FockOperator{ElementTag::BeamSplitter, std::move(mat)};
}

FockOperator cross_kerr_op(int dim_cv, ModeKind arm_kind, int arm_dim, double theta) {
  check_element_dim(std::size_t(dim_cv) * arm_dim);
  Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(std::size_t(dim_cv) * arm_dim,
                                                std::size_t(dim_cv) * arm_dim);
  for (int n = 0; n < dim_cv; ++n)
    for (int j = 0; j < arm_dim; ++j) {
      const int ny = arm_kind == ModeKind::Dv ? dv_photons(j) : j;
      const std::size_t k = std::size_t(n) * arm_dim + j;
      mat(k, k) = std::polar(1.0, -theta * n * ny);
    }
  return FockOperator{ElementTag::CrossKerr, std::move(mat)};
}

FockOperator vacuum_projector_op(int dim) {
  Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(dim, dim);
  mat(0, 0) = 1.0;
  return FockOperator{ElementTag::Projector, std::move(mat)};
}

FockOperator nonzero_projector_op(int dim) {
  Eigen::MatrixXcd mat = Eigen::MatrixXcd::Identity(dim, dim);
  mat(0, 0) = 0.0;
  return FockOperator{ElementTag::Projector, std::move(mat)};
}

FockOperator parity_projector_op(int dim, bool even) {
  Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(dim, dim);
  for (int n = even ? 0 : 1; n < dim; n += 2) mat(n, n) = 1.0;
  return FockOperator{ElementTag::Projector, std::move(mat)};
}

FockOperator dv_pm_projector_op(DvOutcome outcome) {
  if (outcome != DvOutcome::Plus && outcome != DvOutcome::Minus)
    throw std::invalid_argument("dv_pm_projector_op: outcome must be Plus or Minus");
  const double s = outcome == DvOutcome::Plus ? 1.0 : -1.0;
  Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(kDvDim, kDvDim);
  mat(1, 1) = 0.5;
  mat(2, 2) = 0.5;
  mat(1, 2) = 0.5 * s;
  mat(2, 1) = 0.5 * s;
  return FockOperator{ElementTag::Projector, std::move(mat)};
}

FockOperator dv_hv_projector_op(Occupancy occ) {
  if (occ == Occupancy::Vac) throw std::invalid_argument("dv_hv_projector_op: H or V only");
  Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(kDvDim, kDvDim);
  mat(static_cast<int>(occ), static_cast<int>(occ)) = 1.0;
  return FockOperator{ElementTag::Projector, std::move(mat)};
}

FockOperator dv_unitary_op(const std::array<std::array<cplx, 2>, 2>& u) {
  Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(kDvDim, kDvDim);
  mat(0, 0) = 1.0;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) mat(r + 1, c + 1) = u[r][c];
  return FockOperator{ElementTag::Projector, std::move(mat)};
}

cplx displacement_composition_phase(cplx alpha, cplx beta, int cutoff) {
  const auto da = displacement_op(alpha, cutoff + 1);
  const auto db = displacement_op(beta, cutoff + 1);
  Eigen::VectorXcd vac = Eigen::VectorXcd::Zero(cutoff + 1);
  vac(0) = 1.0;
  const Eigen::VectorXcd lhs = db.mat * (da.mat * vac);
  const Eigen::VectorXcd rhs = coherent_vector(alpha + beta, cutoff);
  const cplx z = rhs.dot(lhs);  // <alpha+beta| D(beta)D(alpha) |0>
  return z / std::abs(z);
}

FockState make_state(std::vector<FockMode> modes) {
  FockState s;
  s.modes = std::move(modes);
  const std::size_t dim = s.total_dim();
  if (dim > kMaxTotalDim)
    throw std::runtime_error("fock: total dimension " + std::to_string(dim) +
                             " exceeds the overflow guard");
  s.amp = Eigen::VectorXcd::Zero(dim);
  return s;
}

FockState tensor_extend(const FockState& s, FockMode mode, const Eigen::VectorXcd& single) {
  if (s.has_mode(mode.id))
    throw std::invalid_argument("tensor_extend: duplicate mode id " + std::to_string(mode.id));
  if (single.size() != mode.dim)
    throw std::invalid_argument("tensor_extend: vector length does not match mode dim");
  FockState out;
  out.modes = s.modes;
  out.modes.push_back(mode);
  const std::size_t dim = s.total_dim() * mode.dim;
  if (dim > kMaxTotalDim)
    throw std::runtime_error("fock: total dimension exceeds the overflow guard");
  out.amp.resize(dim);
  for (Eigen::Index i = 0; i < s.amp.size(); ++i)
    for (int j = 0; j < mode.dim; ++j) out.amp(std::size_t(i) * mode.dim + j) = s.amp(i) * single(j);
  return out;
}

cplx overlap(const FockState& a, const FockState& b) {
  if (a.modes.size() != b.modes.size() || a.amp.size() != b.amp.size())
    throw std::invalid_argument("fock overlap: layout mismatch");
  return a.amp.dot(b.amp);
}

double norm_squared(const FockState& s) { return s.amp.squaredNorm(); }

void normalize(FockState& s) {
  const double n2 = norm_squared(s);
  if (n2 <= kProbabilityFloor) throw std::domain_error("fock normalize: degenerate state");
  s.amp /= std::sqrt(n2);
}

void apply_one_mode(FockState& s, int mode_id, const Eigen::MatrixXcd& op) {
  const std::size_t pos = s.mode_pos(mode_id);
  const std::size_t d = s.modes[pos].dim;
  if (op.rows() != Eigen::Index(d) || op.cols() != Eigen::Index(d))
    throw std::invalid_argument("apply_one_mode: operator dimension mismatch");
  const std::size_t stride = stride_of(s.modes, pos);
  const std::size_t outer = s.total_dim() / (d * stride);
  Eigen::VectorXcd in(d), out(d);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t i = 0; i < stride; ++i) {
      const std::size_t base = o * d * stride + i;
      for (std::size_t k = 0; k < d; ++k) in(k) = s.amp(base + k * stride);
      out.noalias() = op * in;
      for (std::size_t k = 0; k < d; ++k) s.amp(base + k * stride) = out(k);
    }
}

void apply_two_mode(FockState& s, int mode_u, int mode_v, const Eigen::MatrixXcd& op) {
  const std::size_t pu = s.mode_pos(mode_u);
  const std::size_t pv = s.mode_pos(mode_v);
  const std::size_t du = s.modes[pu].dim, dv = s.modes[pv].dim;
  if (op.rows() != Eigen::Index(du * dv) || op.cols() != Eigen::Index(du * dv))
    throw std::invalid_argument("apply_two_mode: operator dimension mismatch");
  const std::size_t su = stride_of(s.modes, pu);
  const std::size_t sv = stride_of(s.modes, pv);
  const std::size_t total = s.total_dim();
  const std::size_t sub = du * dv;
  const std::size_t rest = total / sub;
  // Gather the target-mode pair into columns, one matmul, scatter back.
  Eigen::MatrixXcd gathered(sub, rest);
  std::vector<std::size_t> base_index(rest);
  {
    std::size_t r = 0;
    std::vector<std::size_t> digits(s.modes.size(), 0);
    for (std::size_t full = 0; full < total; ++full) {
      std::size_t tmp = full;
      bool is_base = true;
      for (std::size_t m = s.modes.size(); m-- > 0;) {
        digits[m] = tmp % s.modes[m].dim;
        tmp /= s.modes[m].dim;
      }
      if (digits[pu] != 0 || digits[pv] != 0) is_base = false;
      if (is_base) base_index[r++] = full;
    }
  }
  for (std::size_t r = 0; r < rest; ++r) {
    const std::size_t base = base_index[r];
    for (std::size_t iu = 0; iu < du; ++iu)
      for (std::size_t iv = 0; iv < dv; ++iv)
        gathered(iu * dv + iv, r) = s.amp(base + iu * su + iv * sv);
  }
  gathered = op * gathered;
  for (std::size_t r = 0; r < rest; ++r) {
    const std::size_t base = base_index[r];
    for (std::size_t iu = 0; iu < du; ++iu)
      for (std::size_t iv = 0; iv < dv; ++iv)
        s.amp(base + iu * su + iv * sv) = gathered(iu * dv + iv, r);
  }
}

FockState pbs_split(const FockState& s, int in_mode, int out_t, int out_r) {
  const std::size_t pos = s.mode_pos(in_mode);
  if (s.modes[pos].kind != ModeKind::Dv)
    throw std::invalid_argument("fock pbs_split: mode must be DV");
  if (s.has_mode(out_t) || s.has_mode(out_r) || out_t == out_r)
    throw std::invalid_argument("fock pbs_split: output modes must be fresh");
  FockState out;
  out.modes = s.modes;
  out.modes[pos] = FockMode{out_t, ModeKind::Dv, kDvDim};
  out.modes.insert(out.modes.begin() + pos + 1, FockMode{out_r, ModeKind::Dv, kDvDim});
  out.amp = Eigen::VectorXcd::Zero(s.total_dim() * kDvDim);
  const std::size_t stride = stride_of(s.modes, pos);
  const std::size_t outer = s.total_dim() / (kDvDim * stride);
  // |Vac> -> |Vac,Vac>, |H> -> |H,Vac>, |V> -> |Vac,V>
  constexpr int map_t[kDvDim] = {0, 1, 0};
  constexpr int map_r[kDvDim] = {0, 0, 2};
  for (std::size_t o = 0; o < outer; ++o)
    for (int k = 0; k < kDvDim; ++k)
      for (std::size_t i = 0; i < stride; ++i) {
        const cplx v = s.amp(o * kDvDim * stride + k * stride + i);
        if (v == cplx(0.0)) continue;
        const std::size_t idx =
            ((o * kDvDim + map_t[k]) * kDvDim + map_r[k]) * stride + i;
        out.amp(idx) = v;
      }
  return out;
}

FockState pbs_merge(const FockState& s, int in_t, int in_r, int out_mode) {
  const std::size_t pt = s.mode_pos(in_t);
  const std::size_t pr = s.mode_pos(in_r);
  if (pr != pt + 1)
    throw std::invalid_argument("fock pbs_merge: arms must be adjacent (split order)");
  FockState out;
  out.modes = s.modes;
  out.modes[pt] = FockMode{out_mode, ModeKind::Dv, kDvDim};
  out.modes.erase(out.modes.begin() + pr);
  out.amp = Eigen::VectorXcd::Zero(s.total_dim() / kDvDim);
  const std::size_t stride = stride_of(s.modes, pr);
  const std::size_t outer = s.total_dim() / (kDvDim * kDvDim * stride);
  double lost = 0.0;
  for (std::size_t o = 0; o < outer; ++o)
    for (int kt = 0; kt < kDvDim; ++kt)
      for (int kr = 0; kr < kDvDim; ++kr) {
        int merged = -1;
        if (kt == 0 && kr == 0) merged = 0;
        if (kt == 1 && kr == 0) merged = 1;
        if (kt == 0 && kr == 2) merged = 2;
        for (std::size_t i = 0; i < stride; ++i) {
          const cplx v = s.amp(((o * kDvDim + kt) * kDvDim + kr) * stride + i);
          if (v == cplx(0.0)) continue;
          if (merged < 0) {
            lost += std::norm(v);
            continue;
          }
          out.amp((o * kDvDim + merged) * stride + i) = v;
        }
      }
  if (lost > kLeakageTol)
    throw std::domain_error("fock pbs_merge: arms carry weight " + std::to_string(lost) +
                            " outside the single-photon image");
  return out;
}

double fidelity_on_mode(const FockState& s, int mode_id, const Eigen::VectorXcd& ref) {
  const std::size_t pos = s.mode_pos(mode_id);
  const std::size_t d = s.modes[pos].dim;
  if (ref.size() != Eigen::Index(d))
    throw std::invalid_argument("fock fidelity_on_mode: reference dimension mismatch");
  const std::size_t stride = stride_of(s.modes, pos);
  const std::size_t outer = s.total_dim() / (d * stride);
  double acc = 0.0;
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t i = 0; i < stride; ++i) {
      cplx w(0.0);
      for (std::size_t k = 0; k < d; ++k)
        w += std::conj(ref(k)) * s.amp(o * d * stride + k * stride + i);
      acc += std::norm(w);
    }
  const double denom = norm_squared(s) * ref.squaredNorm();
  if (denom <= kProbabilityFloor)
    throw std::domain_error("fock fidelity_on_mode: degenerate state or reference");
  return acc / denom;
}

FockState fock_image(const SuperState& s, const std::vector<FockMode>& modes) {
  if (modes.size() != s.layout.size())
    throw std::invalid_argument("fock_image: mode list does not match layout");
  for (std::size_t i = 0; i < modes.size(); ++i)
    if (modes[i].id != s.layout[i].id || modes[i].kind != s.layout[i].kind)
      throw std::invalid_argument("fock_image: mode list does not match layout");
  FockState out = make_state(modes);
  for (const auto& t : s.terms) {
    Eigen::VectorXcd acc(1);
    acc(0) = t.coeff;
    for (std::size_t i = 0; i < modes.size(); ++i) {
      Eigen::VectorXcd v;
      if (modes[i].kind == ModeKind::Cv)
        v = coherent_vector(std::get<CvSlot>(t.slots[i]).alpha, modes[i].dim - 1);
      else
        v = dv_vector(std::get<DvSlot>(t.slots[i]).occ);
      Eigen::VectorXcd next(acc.size() * v.size());
      for (Eigen::Index a = 0; a < acc.size(); ++a)
        for (Eigen::Index b = 0; b < v.size(); ++b) next(a * v.size() + b) = acc(a) * v(b);
      acc = std::move(next);
    }
    out.amp += acc;
  }
  return out;
}

CrosscheckReport crosscheck(const SuperState& exact, const FockState& fockstate, double tol) {
  const FockState image = fock_image(exact, fockstate.modes);
  CrosscheckReport rep;
  rep.tol = tol;
  rep.max_dev = (image.amp - fockstate.amp).cwiseAbs().maxCoeff();
  rep.max_dev = std::max(rep.max_dev, std::abs(norm_squared(image) - norm_squared(fockstate)));
  rep.pass = rep.max_dev <= tol;
  return rep;
}

}  // namespace hqt::fock
