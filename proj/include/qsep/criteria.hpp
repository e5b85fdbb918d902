#ifndef QSEP_CRITERIA_HPP
#define QSEP_CRITERIA_HPP

#include <cstdint>
#include <stdexcept>

#include "qsep/core.hpp"
#include "qsep/types.hpp"

namespace qsep {

/// Raised when a witness construction has no separating direction
/// (the candidate state is numerically indistinguishable from separable).
struct degenerate_witness_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Hermitian matrix W with tr(W rho_S) >= 0 on separable states and
/// tr(W rho) < 0 for the detected state.
struct Witness {
  Matrix matrix;
  BipartiteDims dims;
  double source_distance = 0.0;  // ||rho_sep - rho|| used in construction; 0 if external
};

/// Validates the Witness invariants (shape, Hermitian within 1e-12).
void validate_witness_shape(const Witness& w);

enum class Verdict { ENTANGLED, SEPARABLE, INCONCLUSIVE };
enum class Criterion { PPT, BALL, WITNESS };

struct CriterionVerdict {
  Verdict verdict = Verdict::INCONCLUSIVE;
  double evidence = 0.0;  // criterion specific: PPT = min PT eigenvalue, BALL = purity
  Criterion criterion = Criterion::PPT;
};

/// Peres-Horodecki test. evidence = min eigenvalue of rho^{T_B}.
/// ENTANGLED when evidence < -tol; otherwise SEPARABLE at dims (2,2), (2,3),
/// (3,2) where PPT is also sufficient, INCONCLUSIVE elsewhere.
CriterionVerdict ppt_check(const DensityMatrix& rho, double tol = 1e-10);

/// Purity-ball sufficient condition: separable when tr(rho^2) <= 1/(p-1).
/// evidence = purity. Never returns ENTANGLED.
CriterionVerdict separable_ball_check(const DensityMatrix& rho);

/// Re tr(W rho). Throws on dimension mismatch; throws std::runtime_error when
/// the imaginary residual of the trace exceeds 1e-10 (non-Hermitian corruption).
double witness_value(const Witness& w, const DensityMatrix& rho);

/// Optimal witness from a state and its (approximate) nearest separable state:
///   W = (rho_sep - rho - <rho_sep, rho_sep - rho> I) / ||rho_sep - rho||
/// with the real Hilbert-Schmidt inner product. Satisfies tr(W rho_sep) = 0
/// and tr(W (rho_sep - rho)) = ||rho_sep - rho||.
/// Throws degenerate_witness_error when ||rho_sep - rho|| <= 1e-8.
Witness optimal_witness(const DensityMatrix& rho, const DensityMatrix& rho_sep);

/// Accept tr(W rho) < -kEntanglementMargin (rather than < 0) before declaring
/// a PPT state entangled; the solver behind rho_sep is approximate and tiny
/// negative values could be noise.
inline constexpr double kEntanglementMargin = 1e-6;

struct WitnessValidationReport {
  bool accepted = false;
  bool nonneg_on_samples = false;  // condition (a)
  bool detects_rho = false;        // condition (b)
  double min_sample_value = 0.0;
  double mean_sample_value = 0.0;
  double value_on_rho = 0.0;
  int n_evaluated = 0;  // < n_samples when early exit fired
};

/// Numerical witness validation: draws `n_samples` separable states (same
/// ensemble as the SEP training data, r uniform in [1, p^2]) and accepts iff
/// (a) every sampled value >= -margin and (b) witness_value(w, rho) <
/// -kEntanglementMargin. Per-sample seeds derive from base_seed XOR index, so
/// the verdict is independent of `threads`. With `early_exit`, evaluation
/// stops after the chunk that broke condition (a); the verdict is unchanged
/// but min/mean then cover only the evaluated prefix.
WitnessValidationReport validate_witness(const Witness& w, const DensityMatrix& rho,
                                         int n_samples, double margin, std::uint64_t base_seed,
                                         unsigned threads = 0, bool early_exit = false);

inline WitnessValidationReport validate_witness(const Witness& w, const DensityMatrix& rho,
                                                std::uint64_t base_seed) {
  return validate_witness(w, rho, 10000, 1e-9, base_seed);
}

}  // namespace qsep

#endif
