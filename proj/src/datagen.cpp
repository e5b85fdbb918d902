#include "qsep/datagen.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "qsep/parallel.hpp"

namespace qsep {

std::string to_string(ClassLabel label) {
  switch (label) {
    case ClassLabel::SEP: return "SEP";
    case ClassLabel::PPT_ENT: return "PPT_ENT";
    case ClassLabel::NPPT_ENT: return "NPPT_ENT";
  }
  throw std::logic_error("unreachable");
}

ClassLabel class_label_from_string(const std::string& s) {
  if (s == "SEP") return ClassLabel::SEP;
  if (s == "PPT_ENT") return ClassLabel::PPT_ENT;
  if (s == "NPPT_ENT") return ClassLabel::NPPT_ENT;
  throw std::invalid_argument("unknown class label: " + s);
}

std::string to_string(Generator g) {
  switch (g) {
    case Generator::MIXTURE: return "MIXTURE";
    case Generator::SEPARABLE_CONSTRUCTION: return "SEPARABLE_CONSTRUCTION";
    case Generator::AUGMENT_REGION: return "AUGMENT_REGION";
    case Generator::AUGMENT_UNITARY: return "AUGMENT_UNITARY";
  }
  throw std::logic_error("unreachable");
}

Generator generator_from_string(const std::string& s) {
  if (s == "MIXTURE") return Generator::MIXTURE;
  if (s == "SEPARABLE_CONSTRUCTION") return Generator::SEPARABLE_CONSTRUCTION;
  if (s == "AUGMENT_REGION") return Generator::AUGMENT_REGION;
  if (s == "AUGMENT_UNITARY") return Generator::AUGMENT_UNITARY;
  throw std::invalid_argument("unknown generator tag: " + s);
}

namespace {

std::string make_id(const char* prefix, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s-%06zu", prefix, index);
  return buf;
}

}  // namespace

// --- robustness region ---

RobustnessRegion make_robustness_region(const DensityMatrix& rho, const Witness& witness) {
  validate_witness_shape(witness);
  if (witness.dims != rho.dims) throw std::invalid_argument("robustness region: dimension mismatch");
  const int p = rho.p();

  // The closed form assumes a unit-trace witness; rescale. A valid witness
  // has tr W > 0 (it is nonnegative on I/p, which sits strictly inside the
  // separable set).
  double tr_w = witness.matrix.trace().real();
  if (tr_w <= 1e-12) {
    throw std::invalid_argument("robustness region: witness trace must be positive for normalization");
  }
  Witness w_norm{witness.matrix / tr_w, witness.dims, witness.source_distance};

  RobustnessRegion region;
  region.rho = rho;
  region.lambda_rho = -witness_value(w_norm, rho);
  if (region.lambda_rho <= 0.0) {
    throw std::invalid_argument("robustness region: witness does not detect rho (tr(W rho) >= 0)");
  }
  region.witness = std::move(w_norm);
  region.nu_lower = 1.0 / (1.0 + region.lambda_rho * p);

  Eigen::SelfAdjointEigenSolver<Matrix> es(region.witness.matrix, Eigen::EigenvaluesOnly);
  for (int i = 0; i < p; ++i) {
    double ev = es.eigenvalues()(i);
    if (ev > 1e-12) {
      ++region.num_pos;
      region.trace_pos += ev;
    }
  }
  if (region.num_pos < 1 || region.trace_pos <= 0.0) {
    throw std::invalid_argument("robustness region: witness has no positive part, region is empty");
  }
  return region;
}

double region_g(const RobustnessRegion& region, double nu) {
  if (!(nu > region.nu_lower && nu < 1.0)) {
    throw std::invalid_argument("region_g: nu must lie in (f(W), 1)");
  }
  const double p = static_cast<double>(region.rho.p());
  const double term1 = (1.0 - nu) / (p - 1.0 - nu);
  const double excess = region.num_pos * (nu * (1.0 + p * region.lambda_rho) - 1.0);
  const double term2 = excess / (p * region.trace_pos + excess);
  return std::min(term1, term2);
}

DensityMatrix region_point(const RobustnessRegion& region, double nu, double mu,
                           const DensityMatrix& sigma) {
  if (!(nu > region.nu_lower && nu < 1.0)) throw std::invalid_argument("region_point: nu out of range");
  if (!(mu >= 0.0 && mu < region_g(region, nu))) {
    throw std::invalid_argument("region_point: mu out of range");
  }
  const int p = region.rho.p();
  Matrix core = nu * region.rho.entries + (1.0 - nu) * Matrix::Identity(p, p) / p;
  DensityMatrix out{(1.0 - mu) * core + mu * sigma.entries, region.rho.dims};

  // Theorem guarantees; a violation means the formula was transcribed wrong.
  if (ppt_check(out).verdict == Verdict::ENTANGLED) {
    throw std::runtime_error("region_point: sampled state failed the PPT re-check");
  }
  if (witness_value(region.witness, out) >= 0.0) {
    throw std::runtime_error("region_point: sampled state not detected by the region witness");
  }
  return out;
}

DensityMatrix sample_in_region(const RobustnessRegion& region, Rng& rng) {
  const double lo = region.nu_lower + kRegionGuard;
  const double hi = 1.0 - kRegionGuard;
  if (!(lo < hi)) throw std::invalid_argument("sample_in_region: nu interval is empty");
  const double nu = uniform_real(rng, lo, hi);
  const double mu = uniform_real(rng, 0.0, (1.0 - kRegionGuard) * region_g(region, nu));
  IntRange kr = default_mixture_k_range(region.rho.dims);
  DensityMatrix sigma = random_density_mixture(region.rho.dims, kr.draw(rng), rng);
  return region_point(region, nu, mu, sigma);
}

// --- local unitaries ---

Matrix haar_unitary(int n, Rng& rng) {
  Matrix g(n, n);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = cxd(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i) {
    cxd d = r(i, i);
    double a = std::abs(d);
    q.col(i) *= (a == 0.0) ? cxd(1.0, 0.0) : d / a;
  }
  return q;
}

LocalUnitaryPair random_local_unitary(const BipartiteDims& dims, Rng& rng) {
  LocalUnitaryPair u;
  u.u_a = haar_unitary(dims.p_a, rng);
  u.u_b = haar_unitary(dims.p_b, rng);
  return u;
}

DensityMatrix random_local_unitary_transform(const DensityMatrix& rho, Rng& rng) {
  LocalUnitaryPair u = random_local_unitary(rho.dims, rng);
  Matrix full = kron(u.u_a, u.u_b);
  return DensityMatrix{full * rho.entries * full.adjoint(), rho.dims};
}

// --- generators ---

std::vector<LabeledSample> generate_sep(const BipartiteDims& dims, int n, const GenConfig& config,
                                        std::uint64_t master_seed) {
  if (n < 1) throw std::invalid_argument("generate_sep: n must be >= 1");
  const int r_max = config.effective_r_max(dims);
  std::vector<LabeledSample> out(n);
  parallel_for(n, config.threads, [&](std::size_t i) {
    std::uint64_t seed = derive_seed(master_seed, 0x5e9, i);
    Rng rng = make_rng(seed);
    int r = uniform_int(rng, 1, r_max);
    LabeledSample s;
    s.id = make_id("sep", i);
    s.rho = random_separable(dims, r, rng);
    s.label = ClassLabel::SEP;
    s.provenance = {seed, Generator::SEPARABLE_CONSTRUCTION, r, std::nullopt};
    out[i] = std::move(s);
  });
  return out;
}

namespace {

/// Deterministic block-parallel rejection sampler: candidates are indexed by
/// attempt number; the first n acceptances in attempt order are kept, so the
/// output does not depend on the worker count. `make` returns an engaged
/// optional on acceptance.
template <class Make>
std::vector<LabeledSample> rejection_sample(int n, const GenConfig& config, const char* stage,
                                            Make&& make, PptEntStats* stats = nullptr) {
  std::vector<LabeledSample> accepted;
  accepted.reserve(n);
  long long attempts = 0;
  const int block = std::max<int>(64, 8 * effective_threads(config.threads));
  long long base = 0;
  while (static_cast<int>(accepted.size()) < n) {
    std::vector<std::optional<LabeledSample>> results(block);
    parallel_for(block, config.threads, [&](std::size_t i) {
      results[i] = make(static_cast<std::uint64_t>(base + static_cast<long long>(i)));
    });
    for (int i = 0; i < block && static_cast<int>(accepted.size()) < n; ++i) {
      ++attempts;
      if (results[i]) accepted.push_back(std::move(*results[i]));
    }
    base += block;
    if (attempts >= config.starvation_window) {
      double rate = static_cast<double>(accepted.size()) / static_cast<double>(attempts);
      if (rate < config.starvation_threshold) {
        std::ostringstream msg;
        msg << stage << ": acceptance rate " << rate << " below " << config.starvation_threshold
            << " after " << attempts << " attempts";
        if (stats) {
          msg << " (ppt candidates: " << stats->ppt_candidates
              << ", degenerate witnesses: " << stats->witness_degenerate
              << ", validation failures: " << stats->validation_failures << ")";
        }
        throw starvation_error(msg.str());
      }
    }
  }
  return accepted;
}

}  // namespace

std::vector<LabeledSample> generate_nppt(const BipartiteDims& dims, int n, const GenConfig& config,
                                         std::uint64_t master_seed) {
  if (n < 1) throw std::invalid_argument("generate_nppt: n must be >= 1");
  IntRange k_range = config.effective_k_nppt(dims);
  if (k_range.lo < 1 || k_range.hi > 4 * dims.p() || k_range.lo > k_range.hi) {
    throw std::invalid_argument("generate_nppt: k_range must lie within [1, 4p]");
  }
  auto samples = rejection_sample(n, config, "generate_nppt", [&](std::uint64_t attempt) {
    std::uint64_t seed = derive_seed(master_seed, 0x49b7, attempt);
    Rng rng = make_rng(seed);
    int k = k_range.draw(rng);
    DensityMatrix rho = random_density_mixture(dims, k, rng);
    std::optional<LabeledSample> out;
    if (ppt_check(rho).verdict == Verdict::ENTANGLED) {
      LabeledSample s;
      s.rho = std::move(rho);
      s.label = ClassLabel::NPPT_ENT;
      s.provenance = {seed, Generator::MIXTURE, k, std::nullopt};
      out = std::move(s);
    }
    return out;
  });
  for (std::size_t i = 0; i < samples.size(); ++i) samples[i].id = make_id("nppt", i);
  return samples;
}

std::vector<LabeledSample> generate_ppt_ent(const BipartiteDims& dims, int n, const GenConfig& config,
                                            std::uint64_t master_seed, PptEntStats* stats) {
  if (n < 1) throw std::invalid_argument("generate_ppt_ent: n must be >= 1");
  IntRange k_range = config.effective_k_ppt(dims);
  PptEntStats local;
  PptEntStats* st = stats ? stats : &local;
  std::atomic<long long> ppt_candidates{0}, degenerate{0}, validation_failures{0};

  auto samples = rejection_sample(
      n, config, "generate_ppt_ent",
      [&](std::uint64_t attempt) -> std::optional<LabeledSample> {
        std::uint64_t seed = derive_seed(master_seed, 0x99f3, attempt);
        Rng rng = make_rng(seed);
        int k = k_range.draw(rng);
        DensityMatrix rho = random_density_mixture(dims, k, rng);
        if (ppt_check(rho).verdict == Verdict::ENTANGLED) return std::nullopt;
        ppt_candidates.fetch_add(1, std::memory_order_relaxed);

        FwResult fw = fw_nearest_separable(rho, config.fw, rng);
        Witness w;
        try {
          w = optimal_witness(rho, fw.nearest);
        } catch (const degenerate_witness_error&) {
          degenerate.fetch_add(1, std::memory_order_relaxed);
          return std::nullopt;
        }
        // Inner loop stays serial; attempts already run in parallel.
        auto report = validate_witness(w, rho, config.n_validation, config.validation_margin,
                                       derive_seed(seed, 0x7a1), 1, /*early_exit=*/true);
        if (!report.accepted) {
          validation_failures.fetch_add(1, std::memory_order_relaxed);
          return std::nullopt;
        }
        LabeledSample s;
        s.rho = std::move(rho);
        s.label = ClassLabel::PPT_ENT;
        s.witness = std::move(w);
        s.provenance = {seed, Generator::MIXTURE, k, std::nullopt};
        return s;
      },
      st);

  st->ppt_candidates = ppt_candidates.load();
  st->witness_degenerate = degenerate.load();
  st->validation_failures = validation_failures.load();
  for (std::size_t i = 0; i < samples.size(); ++i) samples[i].id = make_id("ppt", i);
  return samples;
}

std::vector<LabeledSample> augment(const std::vector<LabeledSample>& seeds, int n_out,
                                   double unitary_fraction, std::uint64_t master_seed,
                                   unsigned threads) {
  if (n_out < 1) throw std::invalid_argument("augment: n_out must be >= 1");
  if (seeds.empty()) throw std::invalid_argument("augment: need at least one seed sample");
  if (unitary_fraction < 0.0 || unitary_fraction > 1.0) {
    throw std::invalid_argument("augment: unitary_fraction must lie in [0, 1]");
  }
  std::vector<RobustnessRegion> regions;
  regions.reserve(seeds.size());
  for (const auto& seed : seeds) {
    if (seed.label != ClassLabel::PPT_ENT || !seed.witness) {
      throw std::invalid_argument("augment: every seed must be PPT_ENT and carry a witness");
    }
    regions.push_back(make_robustness_region(seed.rho, *seed.witness));
  }

  std::vector<LabeledSample> out(n_out);
  parallel_for(n_out, threads, [&](std::size_t i) {
    const std::size_t seed_idx = i % regions.size();
    const RobustnessRegion& region = regions[seed_idx];
    std::uint64_t seed = derive_seed(master_seed, 0xa06, i);
    Rng rng = make_rng(seed);

    LabeledSample s;
    s.id = make_id("aug", i);
    s.rho = sample_in_region(region, rng);
    s.label = ClassLabel::PPT_ENT;
    s.provenance.seed = seed;
    s.provenance.k_or_r = 0;
    s.provenance.parent_id = seeds[seed_idx].id;

    if (uniform_real(rng, 0.0, 1.0) < unitary_fraction) {
      LocalUnitaryPair u = random_local_unitary(region.rho.dims, rng);
      Matrix full = kron(u.u_a, u.u_b);
      s.rho = DensityMatrix{full * s.rho.entries * full.adjoint(), region.rho.dims};
      // The seed witness is not U(x)U covariant; store its conjugation, which
      // detects the transformed state with the same value.
      s.witness = Witness{full * region.witness.matrix * full.adjoint(), region.rho.dims,
                          region.witness.source_distance};
      s.provenance.generator = Generator::AUGMENT_UNITARY;
    } else {
      s.witness = region.witness;
      s.provenance.generator = Generator::AUGMENT_REGION;
    }
    out[i] = std::move(s);
  });
  return out;
}

}  // namespace qsep
