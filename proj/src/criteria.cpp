#include "qsep/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "qsep/parallel.hpp"

namespace qsep {

void validate_witness_shape(const Witness& w) {
  if (w.matrix.rows() != w.dims.p() || w.matrix.cols() != w.dims.p()) {
    throw std::invalid_argument("witness shape does not match dims");
  }
  if (hermiticity_defect(w.matrix) > kHermitianTol) {
    throw std::invalid_argument("witness is not Hermitian within 1e-12");
  }
}

CriterionVerdict ppt_check(const DensityMatrix& rho, double tol) {
  Matrix pt = partial_transpose_b(rho);
  double min_eig = hermitian_min_eigenvalue(pt);
  CriterionVerdict v;
  v.criterion = Criterion::PPT;
  v.evidence = min_eig;
  if (min_eig < -tol) {
    v.verdict = Verdict::ENTANGLED;
  } else {
    const auto& d = rho.dims;
    bool low_dim = (d.p_a == 2 && d.p_b == 2) || (d.p_a == 2 && d.p_b == 3) || (d.p_a == 3 && d.p_b == 2);
    v.verdict = low_dim ? Verdict::SEPARABLE : Verdict::INCONCLUSIVE;
  }
  return v;
}

CriterionVerdict separable_ball_check(const DensityMatrix& rho) {
  CriterionVerdict v;
  v.criterion = Criterion::BALL;
  v.evidence = purity(rho);
  const double bound = 1.0 / static_cast<double>(rho.p() - 1);
  v.verdict = (v.evidence <= bound + 1e-12) ? Verdict::SEPARABLE : Verdict::INCONCLUSIVE;
  return v;
}

double witness_value(const Witness& w, const DensityMatrix& rho) {
  if (w.dims != rho.dims) throw std::invalid_argument("witness_value: dimension mismatch");
  cxd tr = (w.matrix * rho.entries).trace();
  if (std::abs(tr.imag()) > 1e-10) {
    throw std::runtime_error("witness_value: trace has imaginary residual above 1e-10");
  }
  return tr.real();
}

Witness optimal_witness(const DensityMatrix& rho, const DensityMatrix& rho_sep) {
  if (rho.dims != rho_sep.dims) throw std::invalid_argument("optimal_witness: dimension mismatch");
  const int p = rho.p();
  Matrix delta = rho_sep.entries - rho.entries;
  double dist = frobenius(delta);
  if (dist <= 1e-8) {
    throw degenerate_witness_error("optimal_witness: states coincide within 1e-8, no separating direction");
  }
  double c = hs_inner(rho_sep.entries, delta);
  Witness w;
  w.matrix = (delta - c * Matrix::Identity(p, p)) / dist;
  w.dims = rho.dims;
  w.source_distance = dist;
  return w;
}

WitnessValidationReport validate_witness(const Witness& w, const DensityMatrix& rho,
                                         int n_samples, double margin, std::uint64_t base_seed,
                                         unsigned threads, bool early_exit) {
  if (w.dims != rho.dims) throw std::invalid_argument("validate_witness: dimension mismatch");
  const BipartiteDims dims = rho.dims;
  const int r_max = dims.p() * dims.p();

  WitnessValidationReport rep;
  rep.value_on_rho = witness_value(w, rho);
  rep.detects_rho = rep.value_on_rho < -kEntanglementMargin;

  std::vector<double> values;
  values.reserve(n_samples);
  constexpr int kChunk = 512;
  bool violated = false;
  for (int start = 0; start < n_samples && !(early_exit && violated); start += kChunk) {
    const int count = std::min(kChunk, n_samples - start);
    std::vector<double> chunk(count);
    parallel_for(count, threads, [&](std::size_t i) {
      Rng rng = make_rng(derive_seed(base_seed, static_cast<std::uint64_t>(start + i)));
      int r = uniform_int(rng, 1, r_max);
      DensityMatrix s = random_separable(dims, r, rng);
      chunk[i] = witness_value(w, s);
    });
    for (double v : chunk) {
      values.push_back(v);
      if (v < -margin) violated = true;
    }
  }

  rep.n_evaluated = static_cast<int>(values.size());
  rep.min_sample_value = *std::min_element(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  rep.mean_sample_value = sum / static_cast<double>(values.size());
  rep.nonneg_on_samples = !violated;
  rep.accepted = rep.nonneg_on_samples && rep.detects_rho;
  return rep;
}

}  // namespace qsep
