#ifndef QSEP_DATAGEN_HPP
#define QSEP_DATAGEN_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsep/criteria.hpp"
#include "qsep/fw.hpp"
#include "qsep/types.hpp"

namespace qsep {

/// Raised when a rejection sampler's acceptance rate drops below threshold
/// (instead of looping forever). The message carries stage diagnostics.
struct starvation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ClassLabel { SEP, PPT_ENT, NPPT_ENT };

std::string to_string(ClassLabel label);
ClassLabel class_label_from_string(const std::string& s);

enum class Generator { MIXTURE, SEPARABLE_CONSTRUCTION, AUGMENT_REGION, AUGMENT_UNITARY };

std::string to_string(Generator g);
Generator generator_from_string(const std::string& s);

struct Provenance {
  std::uint64_t seed = 0;
  Generator generator = Generator::MIXTURE;
  int k_or_r = 0;
  std::optional<std::string> parent_id;
};

struct LabeledSample {
  std::string id;
  DensityMatrix rho;
  ClassLabel label = ClassLabel::SEP;
  std::optional<Witness> witness;  // present iff label == PPT_ENT
  Provenance provenance;
};

/// Generation defaults. The paper reports no k or r ranges; these are config,
/// recorded in provenance.
struct GenConfig {
  // SEP: number of product terms, uniform in [1, r_max]; r_max defaults to p^2.
  int r_max = 0;  // 0 = use p^2
  // NPPT candidates: mixtures entangled with high probability at small k.
  IntRange k_range_nppt{0, 0};  // {0,0} = use [1, p]
  // PPT-ENT candidates: near the separability threshold.
  IntRange k_range_ppt{0, 0};  // {0,0} = use [p/2, 2p]
  FwConfig fw;
  int n_validation = 10000;
  double validation_margin = 1e-9;
  // Rejection samplers fail once at least `starvation_window` candidates were
  // tried and the acceptance rate is below `starvation_threshold`.
  int starvation_window = 2000;
  double starvation_threshold = 1e-4;
  unsigned threads = 0;

  int effective_r_max(const BipartiteDims& d) const { return r_max > 0 ? r_max : d.p() * d.p(); }
  IntRange effective_k_nppt(const BipartiteDims& d) const {
    return k_range_nppt.hi > 0 ? k_range_nppt : IntRange{1, d.p()};
  }
  IntRange effective_k_ppt(const BipartiteDims& d) const {
    return k_range_ppt.hi > 0 ? k_range_ppt : IntRange{std::max(1, d.p() / 2), 2 * d.p()};
  }
};

/// Mixture term count for generic noise draws (robustness-region sigma).
inline IntRange default_mixture_k_range(const BipartiteDims& d) { return {1, d.p()}; }

// --- robustness region (data augmentation around a PPT entangled seed) ---

/// Region around a PPT entangled state rho inside of which every state stays
/// PPT and entangled, characterized in closed form from a witness detecting
/// rho. Construction rescales the witness to unit trace, which the closed
/// form implicitly assumes (f(W) = 1/(1 + lambda p) is the tr W = 1
/// normalization of the mu = 0 boundary).
struct RobustnessRegion {
  DensityMatrix rho;
  Witness witness;  // unit-trace rescaling of the input witness
  double lambda_rho = 0.0;
  double nu_lower = 0.0;  // f(W) = 1/(1 + lambda p)
  int num_pos = 0;        // count of positive eigenvalues of W
  double trace_pos = 0.0; // sum of positive eigenvalues of W
};

/// Throws std::invalid_argument when the witness does not detect rho, cannot
/// be trace-normalized, or has no positive part (empty region).
RobustnessRegion make_robustness_region(const DensityMatrix& rho, const Witness& witness);

/// g(nu, W): the upper boundary of admissible noise weight mu at a given nu.
/// Requires nu in (nu_lower, 1).
double region_g(const RobustnessRegion& region, double nu);

/// Interior guard keeping samples strictly inside the region.
inline constexpr double kRegionGuard = 1e-6;

/// Deterministic region point (1-mu)(nu rho + (1-nu) I/p) + mu sigma for
/// caller-chosen (nu, mu); validates the bounds and re-verifies PPT and
/// witness negativity on the output.
DensityMatrix region_point(const RobustnessRegion& region, double nu, double mu,
                           const DensityMatrix& sigma);

/// Random draw: nu uniform on (nu_lower + guard, 1 - guard), mu uniform on
/// [0, (1-guard) g(nu)), sigma a random mixture with k in [1, p].
DensityMatrix sample_in_region(const RobustnessRegion& region, Rng& rng);

// --- local unitary transforms ---

/// Haar-random unitary via QR of a complex Ginibre matrix with the R-diagonal
/// phase correction.
Matrix haar_unitary(int n, Rng& rng);

/// (U_A (x) U_B) rho (U_A (x) U_B)^dag with Haar-random local unitaries.
/// Preserves the spectrum, the PT spectrum and the separability class.
DensityMatrix random_local_unitary_transform(const DensityMatrix& rho, Rng& rng);

struct LocalUnitaryPair {
  Matrix u_a;
  Matrix u_b;
};

LocalUnitaryPair random_local_unitary(const BipartiteDims& dims, Rng& rng);

// --- generators ---

/// n separable-by-construction samples, r uniform in [1, r_max].
std::vector<LabeledSample> generate_sep(const BipartiteDims& dims, int n, const GenConfig& config,
                                        std::uint64_t master_seed);

/// Rejection-samples random mixtures (k uniform in k_range) until n states
/// fail the PPT test. Requires k_range within [1, 4p].
std::vector<LabeledSample> generate_nppt(const BipartiteDims& dims, int n, const GenConfig& config,
                                         std::uint64_t master_seed);

struct PptEntStats {
  long long attempts = 0;
  long long ppt_candidates = 0;
  long long witness_degenerate = 0;
  long long validation_failures = 0;
};

/// The full labeling pipeline for PPT entangled states: draw mixtures, keep
/// PPT ones, solve for the nearest separable state, build the optimal
/// witness, and keep the state only when the witness validates against
/// n_validation sampled separable states. Each accepted sample carries its
/// witness. Starves (by theory) at dims (2,2) and (2,3) where PPT states are
/// exactly the separable ones.
std::vector<LabeledSample> generate_ppt_ent(const BipartiteDims& dims, int n, const GenConfig& config,
                                            std::uint64_t master_seed, PptEntStats* stats = nullptr);

/// Region + local-unitary augmentation of PPT entangled seeds. Every output
/// keeps a witness that detects it: the (unit-trace) region witness for pure
/// region draws, its local-unitary conjugation when a transform was applied.
std::vector<LabeledSample> augment(const std::vector<LabeledSample>& seeds, int n_out,
                                   double unitary_fraction, std::uint64_t master_seed,
                                   unsigned threads = 0);

}  // namespace qsep

#endif
