#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace hqt {

using cplx = std::complex<double>;

// Amplitude components closer than this are treated as the same coherent
// primitive when merging terms.
inline constexpr double kMergeTol = 1e-12;
// Coefficients below this magnitude are dropped after merging.
inline constexpr double kCoeffPruneTol = 1e-14;
// Measurement branches below this probability are reported as dead.
inline constexpr double kProbabilityFloor = 1e-18;

enum class ModeKind { Cv, Dv };

// Occupancy of a polarization mode: Vac carries zero photons, H and V one.
enum class Occupancy : std::uint8_t { Vac = 0, H = 1, V = 2 };

int photon_count(Occupancy occ);
std::string to_string(Occupancy occ);

struct ModeSpec {
  int id = 0;
  ModeKind kind = ModeKind::Cv;
};

struct CvSlot {
  cplx alpha;
};

struct DvSlot {
  Occupancy occ = Occupancy::Vac;
};

using Slot = std::variant<CvSlot, DvSlot>;

// One ket product: coefficient times primitives ordered as the layout.
struct Term {
  cplx coeff;
  std::vector<Slot> slots;
};

/// Exact finite superposition of multimode coherent-state and polarization
/// primitives. Terms with identical slot tuples are merged and negligible
/// coefficients pruned, so equality of physical states is decidable by the
/// closed-form overlaps below.
struct SuperState {
  std::vector<ModeSpec> layout;
  std::vector<Term> terms;

  std::size_t mode_index(int mode_id) const;
  ModeKind kind_at(int mode_id) const;
  bool has_mode(int mode_id) const;
};

// --- construction -----------------------------------------------------------

SuperState make_cv_state(int mode_id, cplx alpha);
SuperState make_dv_state(int mode_id, Occupancy occ);
SuperState tensor(const SuperState& a, const SuperState& b);
SuperState scale(const SuperState& s, cplx factor);
// Sum of two states over identical layouts.
SuperState add(const SuperState& a, const SuperState& b);

// Merges duplicate terms and prunes negligible coefficients in place.
void canonicalize(SuperState& s);

// --- overlaps ----------------------------------------------------------------

// <s1|s2> with the closed-form coherent overlap
// <a|b> = exp(-|a|^2/2 - |b|^2/2 + conj(a) b) on CV slots and the
// Kronecker delta on DV slots. Requires identical layouts.
cplx inner_product(const SuperState& s1, const SuperState& s2);
double norm_squared(const SuperState& s);
SuperState normalize(const SuperState& s);

// --- optical elements --------------------------------------------------------

// Symmetric 50:50 splitter: |a,b> -> |(a+b)/sqrt2, (a-b)/sqrt2> on two CV modes.
SuperState apply_beam_splitter(const SuperState& s, int mode_u, int mode_v);

// Polarizing splitter: routes H to out_t and V to out_r, splitting one DV
// mode into two fresh DV arms. apply_pbs_merge is the inverse map and throws
// if the arms would put two photons into one mode.
SuperState apply_pbs_split(const SuperState& s, int in_mode, int out_t, int out_r);
SuperState apply_pbs_merge(const SuperState& s, int in_t, int in_r, int out_mode);

// Cross-Kerr with theta = chi * t: each coherent amplitude picks the phase
// exp(-i n theta) set by the photon count n of the DV arm.
SuperState apply_cross_kerr(const SuperState& s, int cv_mode, int fock_arm, double theta);

// D(delta) with the composition law D(b)D(a) = exp[(b a* - b* a)/2] D(a+b);
// the sign was pinned against the Fock engine (see fock::displacement_phase).
SuperState apply_displacement(const SuperState& s, int cv_mode, cplx delta);

// P(phi): alpha -> exp(i phi) alpha.
SuperState apply_phase_shift(const SuperState& s, int cv_mode, double phi);

// Unitary on the {H,V} subspace of a DV mode, column-major in that basis;
// vacuum is left untouched.
SuperState apply_dv_unitary(const SuperState& s, int dv_mode,
                            const std::array<std::array<cplx, 2>, 2>& u);

// --- measurement -------------------------------------------------------------

enum class CvProjector { Vacuum, NonZero, Even, Odd };
enum class DvBasis { HV, PlusMinus };
enum class DvOutcome { H, V, Plus, Minus };

struct Projection {
  SuperState state;    // unnormalized; empty terms when the branch is dead
  double probability;  // squared norm, 0 when below the probability floor
};

// Projects one CV mode onto a photon-class subspace. Input is expected
// normalized so the squared norm is the branch probability.
Projection project_cv(const SuperState& s, int cv_mode, CvProjector which);

// Projects one DV mode onto |H>/|V> or |+>/|->; vacuum components are
// annihilated by either basis.
Projection project_dv(const SuperState& s, int dv_mode, DvBasis basis, DvOutcome outcome);

// Exact photon-number distribution of the reduced state of one CV mode,
// entries n = 0..n_max.
std::vector<double> photon_number_distribution(const SuperState& s, int cv_mode, int n_max);

// Joint number distribution of two CV modes, row-major (n_u+1) x (n_v+1).
std::vector<double> joint_photon_distribution(const SuperState& s, int mode_u, int mode_v,
                                              int n_u, int n_v);

// Samples from photon_number_distribution; deterministic given the stream.
int sample_photon_count(const SuperState& s, int cv_mode, std::mt19937_64& rng);

// <ref|rho_mode|ref> for a single-mode pure reference: the fidelity between
// the reduced state of `mode_id` and `ref` (both normalized internally).
double fidelity_on_mode(const SuperState& s, int mode_id, const SuperState& ref);

// Uniform double in [0,1) from the top 53 bits; keeps artifacts portable.
double uniform01(std::mt19937_64& rng);

}  // namespace hqt
