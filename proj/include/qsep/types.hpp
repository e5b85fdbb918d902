#ifndef QSEP_TYPES_HPP
#define QSEP_TYPES_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>

namespace qsep {

using cxd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Global numerical tolerances.
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
// Min-eigenvalue floor for PSD checks; absorbs accumulated rounding in large
// mixtures (49x49 worst case).
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kUnitNormTol = 1e-12;

/// Dimensions of a bipartite space H_A (x) H_B. Both factors must be >= 2.
struct BipartiteDims {
  int p_a = 0;
  int p_b = 0;

  BipartiteDims() = default;
  BipartiteDims(int a, int b) : p_a(a), p_b(b) {
    if (a < 2 || b < 2) throw std::invalid_argument("BipartiteDims: both subsystem dimensions must be >= 2");
  }

  int p() const { return p_a * p_b; }
  bool operator==(const BipartiteDims& o) const { return p_a == o.p_a && p_b == o.p_b; }
  bool operator!=(const BipartiteDims& o) const { return !(*this == o); }
};

/// Unit-norm state vector on a bipartite space.
struct PureState {
  Vector amplitudes;
  BipartiteDims dims;
};

/// p x p complex Hermitian, PSD, unit-trace matrix.
struct DensityMatrix {
  Matrix entries;
  BipartiteDims dims;

  int p() const { return dims.p(); }
};

/// Dominant Schmidt triple of a bipartite pure state.
struct SchmidtTop {
  double lambda1 = 0.0;
  Vector a1;
  Vector b1;
};

// --- small algebra helpers shared across modules ---

inline double hs_inner(const Matrix& a, const Matrix& b) {
  // Real Hilbert-Schmidt inner product Re tr(a^dag b).
  return (a.adjoint() * b).trace().real();
}

inline double frobenius(const Matrix& a) { return a.norm(); }

inline double purity(const DensityMatrix& rho) {
  return rho.entries.squaredNorm();  // tr(rho^2) = ||rho||_F^2 for Hermitian rho
}

inline double max_abs(const Matrix& a) { return a.cwiseAbs().maxCoeff(); }

inline double hermiticity_defect(const Matrix& m) {
  return max_abs(m - m.adjoint());
}

/// Throws std::invalid_argument unless `v` has unit norm within tolerance.
void validate_unit(const Vector& v);

/// Validates the DensityMatrix invariants: Hermitian within 1e-12, unit trace
/// within 1e-12 and, when `check_psd`, min eigenvalue >= -1e-10. The PSD check
/// costs an eigendecomposition; hot loops that build convex combinations of
/// projectors skip it.
void validate_density(const DensityMatrix& rho, bool check_psd = true);

}  // namespace qsep

#endif
