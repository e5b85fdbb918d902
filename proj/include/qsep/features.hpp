#ifndef QSEP_FEATURES_HPP
#define QSEP_FEATURES_HPP

#include <string>
#include <vector>

#include "qsep/datagen.hpp"
#include "qsep/types.hpp"

namespace qsep {

/// Generalized Gell-Mann basis of traceless Hermitian p x p matrices, in the
/// fixed canonical order: symmetric S_{i,j} by (i,j) lexicographic, then
/// antisymmetric A_{i,j}, then diagonal D_k. tr(G_l G_m) = 2 delta_{lm}.
struct GellMannBasis {
  int p = 0;
  std::vector<Matrix> matrices;  // p^2 - 1 entries
};

/// Throws for p < 2. Results are cached per p (construction is deterministic
/// and order-stable, so feature columns are reproducible).
const GellMannBasis& gellmann_basis(int p);

struct BlochVector {
  Eigen::VectorXd beta;  // length p^2 - 1
  int p = 0;
};

/// beta_l = Re tr(G_l rho), with a guard on the imaginary residual (<= 1e-10,
/// else std::runtime_error: the input was corrupted away from Hermitian).
/// Uses the closed-form traces (the basis matrices touch 2 or k+1 entries each).
BlochVector bloch_vector(const DensityMatrix& rho, const GellMannBasis& basis);

/// Inverse map rho = I/p + sum_l (beta_l / 2) G_l. The factor 1/2 comes from
/// the normalization tr(G_l G_m) = 2 delta_{lm}.
Matrix bloch_reconstruct(const BlochVector& beta, const GellMannBasis& basis);

/// Feature matrix export: one row per sample, columns beta_1..beta_{p^2-1},
/// then label (SEP -> -1, entangled -> +1) and the class name. Floats carry
/// 17 significant digits. Writes to a temp file and renames into place.
void write_features_csv(const std::string& path, const std::vector<LabeledSample>& samples);

}  // namespace qsep

#endif
