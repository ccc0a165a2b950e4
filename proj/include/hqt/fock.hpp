#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hqt/coherent.hpp"

namespace hqt::fock {

// Guard against runaway tensor products; generous for desk-scale runs.
inline constexpr std::size_t kMaxTotalDim = 1u << 23;
inline constexpr int kMaxElementDim = 4096;
// Acceptable norm loss when preparing a coherent state under truncation.
inline constexpr double kLeakageTol = 1e-10;
// Dimension of the number-basis embedding of a polarization mode
// (indices Vac, H, V; photon numbers 0, 1, 1).
inline constexpr int kDvDim = 3;

/// Per-mode truncation: smallest cutoff keeping the Poisson tail of a mode
/// that ever carries mean photon number `max_mean_photons` below ~1e-10.
int cutoff_for(double max_mean_photons);

struct FockMode {
  int id = 0;
  ModeKind kind = ModeKind::Cv;
  int dim = 0;  // cutoff + 1 for CV, kDvDim for DV
};

/// Dense state vector over the tensor-product number basis, mode 0 slowest.
struct FockState {
  std::vector<FockMode> modes;
  Eigen::VectorXcd amp;

  std::size_t total_dim() const;
  std::size_t mode_pos(int mode_id) const;
  bool has_mode(int mode_id) const;
};

enum class ElementTag { BeamSplitter, CrossKerr, Displacement, PhaseShift, Projector };

struct FockOperator {
  ElementTag tag;
  Eigen::MatrixXcd mat;
};

// --- single-mode vectors ------------------------------------------------------

// Number-basis expansion of |alpha>, coefficients alpha^n e^{-|a|^2/2}/sqrt(n!).
// Throws when the truncation leaks more than kLeakageTol of the norm.
Eigen::VectorXcd coherent_vector(cplx alpha, int cutoff);
Eigen::VectorXcd dv_vector(Occupancy occ);

// --- element builders ---------------------------------------------------------

// exp(delta a^+ - conj(delta) a), numerically exponentiated. This builder is
// the convention authority for the displacement composition phase.
FockOperator displacement_op(cplx delta, int dim);

// Diagonal exp(i phi n).
FockOperator phase_shift_op(double phi, int dim);

// Symmetric 50:50 splitter matching |a,b> -> |(a+b)/sqrt2,(a-b)/sqrt2>:
// blockwise exponential of pi/4 (a^+b - b^+a) followed by a pi phase on the
// second mode. Basis index (i,j) -> i*dim_v + j.
FockOperator beam_splitter_op(int dim_u, int dim_v);

// Diagonal exp(-i theta n_x n_y); the arm kind selects its photon grading
// (plain number basis for CV, the Vac/H/V embedding for DV).
FockOperator cross_kerr_op(int dim_cv, ModeKind arm_kind, int arm_dim, double theta);

FockOperator vacuum_projector_op(int dim);
FockOperator nonzero_projector_op(int dim);
FockOperator parity_projector_op(int dim, bool even);
FockOperator dv_pm_projector_op(DvOutcome outcome);       // |+><+| or |-><-|
FockOperator dv_hv_projector_op(Occupancy occ);           // |H><H| or |V><V|
// {H,V}-block unitary embedded in the Vac/H/V space.
FockOperator dv_unitary_op(const std::array<std::array<cplx, 2>, 2>& u);

// Extracted composition phase: the complex unit z with
// D(beta) D(alpha) |0> = z |alpha+beta>. Resolves the printed-law ambiguity.
cplx displacement_composition_phase(cplx alpha, cplx beta, int cutoff);

// --- state algebra ------------------------------------------------------------

FockState make_state(std::vector<FockMode> modes);
// Appends one mode holding `single` to an existing state.
FockState tensor_extend(const FockState& s, FockMode mode, const Eigen::VectorXcd& single);

cplx overlap(const FockState& a, const FockState& b);
double norm_squared(const FockState& s);
void normalize(FockState& s);

void apply_one_mode(FockState& s, int mode_id, const Eigen::MatrixXcd& op);
// Operator basis: index = i_u * dim_v + i_v for target modes (u, v).
void apply_two_mode(FockState& s, int mode_u, int mode_v, const Eigen::MatrixXcd& op);

// PBS as index surgery on the Vac/H/V embedding. The merge drops amplitude on
// arm pairs outside the single-photon image and throws if that amplitude
// exceeds kLeakageTol.
FockState pbs_split(const FockState& s, int in_mode, int out_t, int out_r);
FockState pbs_merge(const FockState& s, int in_t, int in_r, int out_mode);

// <ref|rho_mode|ref> for a normalized single-mode reference vector.
double fidelity_on_mode(const FockState& s, int mode_id, const Eigen::VectorXcd& ref);

// --- bridge to the exact engine ------------------------------------------------

// Dense image of an exact superposition; `modes` must match the state layout.
FockState fock_image(const SuperState& s, const std::vector<FockMode>& modes);

struct CrosscheckReport {
  double max_dev = 0.0;
  double tol = 0.0;
  bool pass = true;
};

// Entrywise and norm comparison of an exact state against its Fock twin.
CrosscheckReport crosscheck(const SuperState& exact, const FockState& fock, double tol);

}  // namespace hqt::fock
