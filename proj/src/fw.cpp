#include "qsep/fw.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

#include "qsep/parallel.hpp"

namespace qsep {

namespace {

Matrix product_projector(const Vector& a, const Vector& b) {
  Matrix pa = a * a.adjoint();
  Matrix pb = b * b.adjoint();
  return kron(pa, pb);
}

constexpr double kAtomPruneWeight = 1e-14;

}  // namespace

Matrix decomposition_matrix(const std::vector<ProductAtom>& atoms, const BipartiteDims& dims) {
  Matrix m = Matrix::Zero(dims.p(), dims.p());
  for (const auto& atom : atoms) m.noalias() += atom.weight * product_projector(atom.a, atom.b);
  return m;
}

FwResult fw_nearest_separable(const DensityMatrix& rho, const FwConfig& config, Rng& rng) {
  if (config.max_iters < 1) throw std::invalid_argument("FwConfig: max_iters must be >= 1");
  const BipartiteDims dims = rho.dims;

  Vector a0, b0;
  if (config.initial_product) {
    a0 = config.initial_product->first;
    b0 = config.initial_product->second;
    validate_unit(a0);
    validate_unit(b0);
  } else {
    a0 = haar_unit_vector(dims.p_a, rng);
    b0 = haar_unit_vector(dims.p_b, rng);
  }

  Matrix iterate = product_projector(a0, b0);
  // Atom weights are stored relative to a running scale so that the
  // per-iteration rescale by (1 - alpha) is O(1); true weight = raw * scale.
  std::vector<ProductAtom> atoms{{1.0, a0, b0}};
  double scale = 1.0;
  auto prune_atoms = [&] {
    std::erase_if(atoms, [&](const ProductAtom& a) { return a.weight * scale < kAtomPruneWeight; });
  };

  FwResult result;
  result.nearest.dims = dims;
  if (config.track_trajectory) {
    result.trajectory.push_back({0, (iterate - rho.entries).norm()});
  }

  double gap = 0.0;
  int t = 0;
  for (; t < config.max_iters; ++t) {
    Matrix grad_source = rho.entries - iterate;
    auto [eig, s_star] = hermitian_top_eigpair(grad_source, config.eig_method);
    (void)eig;
    SchmidtTop top = schmidt_top(PureState{s_star, dims});
    Matrix sigma_star = product_projector(top.a1, top.b1);

    // FW gap with the approximate subproblem solution.
    gap = 2.0 * hs_inner(iterate - rho.entries, iterate - sigma_star);
    if (config.gap_tol > 0.0 && gap <= config.gap_tol) break;

    const double alpha = 2.0 / static_cast<double>(t + 2);
    iterate = (1.0 - alpha) * iterate + alpha * sigma_star;

    if (alpha == 1.0) {  // t == 0: the start atom is fully replaced
      atoms.clear();
      scale = 1.0;
      atoms.push_back({1.0, top.a1, top.b1});
    } else {
      scale *= (1.0 - alpha);
      atoms.push_back({alpha / scale, top.a1, top.b1});
      if (t % 256 == 0) prune_atoms();
    }

    if (config.track_trajectory) {
      result.trajectory.push_back({t + 1, (iterate - rho.entries).norm()});
    }
#ifndef NDEBUG
    assert(hermiticity_defect(iterate) <= 1e-12);
    assert(std::abs(iterate.trace().real() - 1.0) <= 1e-10);
#endif
  }

  prune_atoms();
  for (auto& atom : atoms) atom.weight *= scale;

  result.nearest.entries = std::move(iterate);
  result.distance = (result.nearest.entries - rho.entries).norm();
  result.iterations_run = t;
  result.final_gap = gap;
  result.decomposition = std::move(atoms);
  return result;
}

std::vector<ErrorCurvePoint> fw_error_curve(const std::vector<DensityMatrix>& inputs,
                                            const std::string& class_tag, const FwConfig& config,
                                            std::uint64_t base_seed, unsigned threads) {
  if (inputs.empty()) throw std::invalid_argument("fw_error_curve: inputs must be nonempty");
  if (!config.track_trajectory) {
    throw std::invalid_argument("fw_error_curve: config must set track_trajectory");
  }
  const BipartiteDims dims = inputs.front().dims;
  for (const auto& rho : inputs) {
    if (rho.dims != dims) throw std::invalid_argument("fw_error_curve: inputs have mixed dims");
  }

  std::vector<std::vector<std::pair<int, double>>> trajectories(inputs.size());
  parallel_for(inputs.size(), threads, [&](std::size_t i) {
    Rng rng = make_rng(derive_seed(base_seed, static_cast<std::uint64_t>(i)));
    trajectories[i] = fw_nearest_separable(inputs[i], config, rng).trajectory;
  });

  std::size_t max_len = 0;
  for (const auto& tr : trajectories) max_len = std::max(max_len, tr.size());

  std::vector<ErrorCurvePoint> curve;
  curve.reserve(max_len);
  for (std::size_t step = 0; step < max_len; ++step) {
    double sum = 0.0, sum_sq = 0.0;
    int n = 0;
    for (const auto& tr : trajectories) {
      if (step < tr.size()) {
        sum += tr[step].second;
        sum_sq += tr[step].second * tr[step].second;
        ++n;
      }
    }
    const double mean = sum / n;
    const double var = std::max(0.0, sum_sq / n - mean * mean);
    curve.push_back({class_tag, static_cast<int>(step), mean, std::sqrt(var)});
  }
  return curve;
}

}  // namespace qsep
