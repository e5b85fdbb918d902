#ifndef QSEP_FW_HPP
#define QSEP_FW_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qsep/core.hpp"
#include "qsep/types.hpp"

namespace qsep {

/// One rank-one product atom of the iterate's separable decomposition:
/// weight * (a a^dag) (x) (b b^dag).
struct ProductAtom {
  double weight = 0.0;
  Vector a;
  Vector b;
};

struct FwConfig {
  int max_iters = 1000;
  // Optional stop on the Frank-Wolfe gap <2(rho_t - rho), rho_t - sigma*>.
  // The classic loop has no stopping rule; 0 disables the stop entirely so
  // exactly max_iters iterations run.
  double gap_tol = 1e-7;
  bool track_trajectory = false;
  EigMethod eig_method = EigMethod::Dense;
  // Test hook: start from a fixed product state instead of a random one.
  std::optional<std::pair<Vector, Vector>> initial_product;
};

struct FwResult {
  DensityMatrix nearest;            // separable by construction
  double distance = 0.0;            // ||nearest - rho||_F
  int iterations_run = 0;
  double final_gap = 0.0;
  std::vector<std::pair<int, double>> trajectory;  // (iteration, distance), iteration 0 = start
  std::vector<ProductAtom> decomposition;          // reconstructs `nearest` within 1e-10
};

/// Nearest separable density matrix by Frank-Wolfe with the approximate
/// linear subproblem: each iteration takes the top eigenvector of
/// (rho - rho_t), extracts its dominant Schmidt pair, and mixes the resulting
/// product projector in with step 2/(t+2). rho_0 is a random product pure
/// state drawn from `rng` unless the config injects one.
FwResult fw_nearest_separable(const DensityMatrix& rho, const FwConfig& config, Rng& rng);

/// Dense matrix reconstructed from the atom list (test/verification helper).
Matrix decomposition_matrix(const std::vector<ProductAtom>& atoms, const BipartiteDims& dims);

struct ErrorCurvePoint {
  std::string class_tag;
  int iteration = 0;
  double mean_distance = 0.0;
  double std_distance = 0.0;
};

/// Runs the solver with trajectory tracking on every input (one derived seed
/// per input; parallel over inputs) and aggregates the per-iteration mean and
/// standard deviation of the distance. Inputs must share dims and the config
/// must request trajectories.
std::vector<ErrorCurvePoint> fw_error_curve(const std::vector<DensityMatrix>& inputs,
                                            const std::string& class_tag, const FwConfig& config,
                                            std::uint64_t base_seed, unsigned threads = 0);

}  // namespace qsep

#endif
