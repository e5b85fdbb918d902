#ifndef QSEP_CORE_HPP
#define QSEP_CORE_HPP

#include <utility>

#include "qsep/rng.hpp"
#include "qsep/types.hpp"

namespace qsep {

/// Inclusive integer interval for mixture/term counts.
struct IntRange {
  int lo = 1;
  int hi = 1;
  int draw(Rng& rng) const { return uniform_int(rng, lo, hi); }
};

Matrix kron(const Matrix& a, const Matrix& b);

/// Haar-uniform unit vector in C^n: complex standard Gaussian, normalized.
Vector haar_unit_vector(int n, Rng& rng);

/// Haar-random pure state on the full bipartite space.
PureState haar_random_pure(const BipartiteDims& dims, Rng& rng);

/// Uniform mixture of k Haar-random pure projectors on C^dim.
/// Rank <= k by construction.
Matrix random_density_mixture_matrix(int dim, int k, Rng& rng);

DensityMatrix random_density_mixture(const BipartiteDims& dims, int k, Rng& rng);

/// Uniform weights on the r-simplex via normalized exponential variates.
Eigen::VectorXd simplex_weights(int r, Rng& rng);

/// Separable-by-construction state: sum_j q_j sigma_{A,j} (x) sigma_{B,j}
/// with q uniform on the simplex and each factor a random mixture whose term
/// count is drawn from `k_a` / `k_b` (defaults: [1, p_sub^2], spanning pure
/// products to deep mixtures).
DensityMatrix random_separable(const BipartiteDims& dims, int r, Rng& rng);
DensityMatrix random_separable(const BipartiteDims& dims, int r, Rng& rng,
                               const IntRange& k_a, const IntRange& k_b);

/// Blockwise transpose of the B-subsystem blocks. A pure entry permutation:
/// applying it twice is a bit-exact identity. Output is Hermitian with trace
/// one but need not be PSD.
Matrix partial_transpose_b(const DensityMatrix& rho);

/// Dominant Schmidt triple via SVD of the p_a x p_b reshaping
/// M[i][j] = amplitudes[i*p_b + j]. |a1>(x)|b1> is the best product-state
/// approximation of the input.
SchmidtTop schmidt_top(const PureState& state);

enum class EigMethod { Dense, Power };

/// Algebraically largest eigenpair of a Hermitian matrix.
/// Dense path: full eigendecomposition (p <= 49 everywhere in practice).
/// Power path: iterate on M + p*I (valid while the spectral radius of M stays
/// below p, which holds for differences of density matrices), tolerance 1e-10,
/// at most 10000 iterations.
/// Throws std::invalid_argument when M is non-Hermitian beyond 1e-10.
std::pair<double, Vector> hermitian_top_eigpair(const Matrix& m, EigMethod method = EigMethod::Dense);

/// Smallest eigenvalue of a Hermitian matrix (used by the PPT and PSD checks).
double hermitian_min_eigenvalue(const Matrix& m);

}  // namespace qsep

#endif
