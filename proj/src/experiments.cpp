#include "qsep/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "qsep/io_util.hpp"
#include "qsep/parallel.hpp"

namespace qsep {

namespace {

std::vector<std::size_t> indices_of(const std::vector<LabeledSample>& samples, ClassLabel label) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].label == label) idx.push_back(i);
  }
  return idx;
}

std::vector<std::size_t> subsample(std::vector<std::size_t> idx, std::size_t n, Rng& rng) {
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(n);
  return idx;
}

struct BinarySet {
  std::vector<Eigen::VectorXd> x;
  std::vector<int> y;
};

void append_features(BinarySet& set, const std::vector<LabeledSample>& samples,
                     const std::vector<std::size_t>& idx, int label, const GellMannBasis& basis) {
  for (std::size_t i : idx) {
    set.x.push_back(bloch_vector(samples[i].rho, basis).beta);
    set.y.push_back(label);
  }
}

/// One repetition's training set: n SEP (label -1) and n entangled (label +1,
/// ppt_ratio of it PPT_ENT).
BinarySet assemble_training_set(const std::vector<LabeledSample>& train, double ppt_ratio,
                                const std::optional<AugmentConfig>& augment_config,
                                int n_per_class, std::uint64_t rep_seed, const GellMannBasis& basis,
                                unsigned threads) {
  if (ppt_ratio < 0.0 || ppt_ratio > 1.0) {
    throw std::invalid_argument("run_experiment: ppt_ratio must lie in [0, 1]");
  }
  auto sep_idx = indices_of(train, ClassLabel::SEP);
  auto ppt_idx = indices_of(train, ClassLabel::PPT_ENT);
  auto nppt_idx = indices_of(train, ClassLabel::NPPT_ENT);

  int n = n_per_class;
  if (n <= 0) {
    // Balanced maximum supported by the pools at this ratio.
    n = static_cast<int>(sep_idx.size());
    if (ppt_ratio < 1.0) {
      n = std::min<int>(n, static_cast<int>(std::floor(nppt_idx.size() / (1.0 - ppt_ratio))));
    }
    if (ppt_ratio > 0.0 && !augment_config) {
      n = std::min<int>(n, static_cast<int>(std::floor(ppt_idx.size() / ppt_ratio)));
    }
  }
  const int n_ppt = static_cast<int>(std::lround(ppt_ratio * n));
  const int n_nppt = n - n_ppt;
  if (n < 1) throw std::invalid_argument("run_experiment: empty training class");
  if (static_cast<int>(sep_idx.size()) < n || static_cast<int>(nppt_idx.size()) < n_nppt) {
    throw std::invalid_argument("run_experiment: insufficient SEP or NPPT_ENT training samples");
  }

  Rng rng = make_rng(derive_seed(rep_seed, 0x5e1ec7));
  BinarySet set;
  append_features(set, train, subsample(sep_idx, n, rng), -1, basis);
  append_features(set, train, subsample(nppt_idx, n_nppt, rng), +1, basis);

  if (n_ppt > 0) {
    if (augment_config) {
      const int n_seeds = std::min<int>(augment_config->n_seeds, static_cast<int>(ppt_idx.size()));
      if (n_seeds < 1) throw std::invalid_argument("run_experiment: no PPT_ENT seeds to augment");
      std::vector<LabeledSample> seeds;
      for (std::size_t i : subsample(ppt_idx, n_seeds, rng)) seeds.push_back(train[i]);
      auto augmented = augment(seeds, n_ppt, augment_config->unitary_fraction,
                               derive_seed(rep_seed, 0xa06e), threads);
      for (const auto& s : augmented) {
        set.x.push_back(bloch_vector(s.rho, basis).beta);
        set.y.push_back(+1);
      }
    } else {
      if (static_cast<int>(ppt_idx.size()) < n_ppt) {
        throw std::invalid_argument("run_experiment: insufficient PPT_ENT training samples");
      }
      append_features(set, train, subsample(ppt_idx, n_ppt, rng), +1, basis);
    }
  }
  return set;
}

struct RepScores {
  std::map<std::string, double> recall;
  std::map<std::string, int> counts;
};

RepScores score_classes(const KernelModel& model,
                        const std::vector<std::pair<std::string, Eigen::VectorXd>>& test_features) {
  std::map<std::string, int> correct, total;
  for (const auto& [tag, x] : test_features) {
    const int truth = (tag == "SEP" || tag == "FW") ? -1 : +1;
    ++total[tag];
    if (svm_predict(model, x).label == truth) ++correct[tag];
  }
  RepScores out;
  for (const auto& [tag, n] : total) {
    out.recall[tag] = static_cast<double>(correct[tag]) / n;
    out.counts[tag] = n;
  }
  return out;
}

EvalReport aggregate(const std::vector<RepScores>& reps, const KernelSpec& kernel, double c) {
  EvalReport report;
  report.selected_kernel = kernel;
  report.selected_c = c;
  for (const auto& [tag, n] : reps.front().counts) {
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& rep : reps) {
      double v = rep.recall.at(tag);
      sum += v;
      sum_sq += v * v;
    }
    const double mean = sum / reps.size();
    const double var = std::max(0.0, sum_sq / reps.size() - mean * mean);
    report.per_class[tag] = {mean, std::sqrt(var), reps.front().counts.at(tag)};
  }
  return report;
}

std::vector<std::pair<std::string, Eigen::VectorXd>> featurize_test(
    const std::vector<LabeledSample>& test, const GellMannBasis& basis) {
  std::vector<std::pair<std::string, Eigen::VectorXd>> out;
  out.reserve(test.size());
  for (const auto& s : test) {
    out.emplace_back(to_string(s.label), bloch_vector(s.rho, basis).beta);
  }
  return out;
}

}  // namespace

KernelModel train_classifier(const std::vector<LabeledSample>& train, double ppt_ratio,
                             const std::optional<AugmentConfig>& augment_config,
                             const ExperimentConfig& config, std::uint64_t seed, CvResult* cv_out) {
  if (train.empty()) throw std::invalid_argument("train_classifier: empty training set");
  const GellMannBasis& basis = gellmann_basis(train.front().rho.p());
  BinarySet set = assemble_training_set(train, ppt_ratio, augment_config, config.n_train_per_class,
                                        seed, basis, config.threads);
  CvResult cv = cross_validate(set.x, set.y, config.kernel_grid, config.c_grid, config.folds,
                               derive_seed(seed, 0xcf), config.threads);
  KernelModel model = svm_train(set.x, set.y, cv.best_kernel, cv.best_c, 1e-3, seed);
  for (const auto& cell : cv.table) model.training_meta.fold_scores.push_back(cell.accuracy);
  if (cv_out) *cv_out = cv;
  return model;
}

EvalReport run_experiment(const std::vector<LabeledSample>& train,
                          const std::vector<LabeledSample>& test, double ppt_ratio,
                          const std::optional<AugmentConfig>& augment_config,
                          const ExperimentConfig& config, std::uint64_t seed) {
  if (test.empty()) throw std::invalid_argument("run_experiment: empty test set");
  const GellMannBasis& basis = gellmann_basis(test.front().rho.p());
  auto test_features = featurize_test(test, basis);

  std::vector<RepScores> reps;
  KernelSpec last_kernel;
  double last_c = 0.0;
  for (int rep = 0; rep < std::max(1, config.repetitions); ++rep) {
    CvResult cv;
    KernelModel model =
        train_classifier(train, ppt_ratio, augment_config, config, derive_seed(seed, rep), &cv);
    reps.push_back(score_classes(model, test_features));
    last_kernel = cv.best_kernel;
    last_c = cv.best_c;
  }
  return aggregate(reps, last_kernel, last_c);
}

std::vector<KSweepRow> k_sweep(const KernelModel& model, const BipartiteDims& dims,
                               const std::vector<int>& k_values, int n_per_k, std::uint64_t seed,
                               unsigned threads) {
  if (n_per_k < 1) throw std::invalid_argument("k_sweep: n_per_k must be >= 1");
  const GellMannBasis& basis = gellmann_basis(dims.p());
  std::vector<KSweepRow> rows;
  rows.reserve(k_values.size());
  for (std::size_t ki = 0; ki < k_values.size(); ++ki) {
    const int k = k_values[ki];
    std::vector<int> pred_sep(n_per_k, 0), is_ppt(n_per_k, 0), in_ball(n_per_k, 0);
    parallel_for(n_per_k, threads, [&](std::size_t i) {
      Rng rng = make_rng(derive_seed(seed, ki, i));
      DensityMatrix rho = random_density_mixture(dims, k, rng);
      pred_sep[i] = svm_predict(model, bloch_vector(rho, basis).beta).label == -1 ? 1 : 0;
      is_ppt[i] = ppt_check(rho).verdict != Verdict::ENTANGLED ? 1 : 0;
      in_ball[i] = separable_ball_check(rho).verdict == Verdict::SEPARABLE ? 1 : 0;
    });
    auto ratio = [&](const std::vector<int>& v) {
      return static_cast<double>(std::accumulate(v.begin(), v.end(), 0)) / n_per_k;
    };
    rows.push_back({k, ratio(pred_sep), ratio(is_ppt), ratio(in_ball)});
  }
  return rows;
}

EvalReport fw_limitation_experiment(const std::vector<LabeledSample>& train,
                                    const std::vector<LabeledSample>& test,
                                    bool include_fw_in_train, const FwLimitationConfig& config,
                                    std::uint64_t seed) {
  if (train.empty() || test.empty()) throw std::invalid_argument("fw_limitation: empty data");
  const GellMannBasis& basis = gellmann_basis(test.front().rho.p());

  // FW data: nearest-separable outputs for entangled inputs.
  auto make_fw_data = [&](const std::vector<LabeledSample>& pool, int n_wanted,
                          std::uint64_t fw_seed) {
    std::vector<const DensityMatrix*> entangled;
    for (const auto& s : pool) {
      if (s.label != ClassLabel::SEP) entangled.push_back(&s.rho);
    }
    const int n = std::min<int>(n_wanted, static_cast<int>(entangled.size()));
    if (n < 1) throw std::invalid_argument("fw_limitation: no entangled inputs for FW data");
    std::vector<Eigen::VectorXd> features(n);
    parallel_for(n, config.experiment.threads, [&](std::size_t i) {
      Rng rng = make_rng(derive_seed(fw_seed, i));
      FwResult fw = fw_nearest_separable(*entangled[i], config.fw, rng);
      features[i] = bloch_vector(fw.nearest, basis).beta;
    });
    return features;
  };

  auto test_features = featurize_test(test, basis);
  const int n_test_sep = static_cast<int>(indices_of(test, ClassLabel::SEP).size());
  const int n_fw_test = config.n_fw_test > 0 ? config.n_fw_test : std::max(1, n_test_sep);
  for (auto& x : make_fw_data(test, n_fw_test, derive_seed(seed, 0xfe57))) {
    test_features.emplace_back("FW", std::move(x));
  }

  std::vector<RepScores> reps;
  KernelSpec last_kernel;
  double last_c = 0.0;
  for (int rep = 0; rep < std::max(1, config.experiment.repetitions); ++rep) {
    const std::uint64_t rep_seed = derive_seed(seed, rep);
    BinarySet set = assemble_training_set(train, 0.0, std::nullopt,
                                          config.experiment.n_train_per_class, rep_seed, basis,
                                          config.experiment.threads);
    if (include_fw_in_train) {
      const int n_fw = config.n_fw_train > 0 ? config.n_fw_train
                                             : static_cast<int>(set.x.size()) / 2;
      for (auto& x : make_fw_data(train, n_fw, derive_seed(rep_seed, 0xf1))) {
        set.x.push_back(std::move(x));
        set.y.push_back(-1);  // FW outputs are separable by construction
      }
    }
    CvResult cv = cross_validate(set.x, set.y, config.experiment.kernel_grid,
                                 config.experiment.c_grid, config.experiment.folds,
                                 derive_seed(rep_seed, 0xcf), config.experiment.threads);
    KernelModel model = svm_train(set.x, set.y, cv.best_kernel, cv.best_c, 1e-3, rep_seed);
    reps.push_back(score_classes(model, test_features));
    last_kernel = cv.best_kernel;
    last_c = cv.best_c;
  }
  return aggregate(reps, last_kernel, last_c);
}

void write_error_curve_csv(const std::string& path, const std::vector<ErrorCurvePoint>& curve) {
  std::string body = "class,iteration,mean_distance,std_distance\n";
  for (const auto& pt : curve) {
    body += pt.class_tag + "," + std::to_string(pt.iteration) + "," +
            format_double17(pt.mean_distance) + "," + format_double17(pt.std_distance) + "\n";
  }
  atomic_write_file(path, body);
}

void write_k_sweep_csv(const std::string& path, const std::vector<KSweepRow>& rows) {
  std::string body = "k,ratio_predicted_separable,ratio_ppt,ratio_ball\n";
  for (const auto& r : rows) {
    body += std::to_string(r.k) + "," + format_double17(r.ratio_predicted_separable) + "," +
            format_double17(r.ratio_ppt) + "," + format_double17(r.ratio_ball) + "\n";
  }
  atomic_write_file(path, body);
}

void write_eval_report_csv(const std::string& path, const EvalReport& report) {
  std::string body = "class,score_mean,score_std,n_test\n";
  for (const auto& [tag, score] : report.per_class) {
    body += tag + "," + format_double17(score.mean) + "," + format_double17(score.std_dev) + "," +
            std::to_string(score.n_test) + "\n";
  }
  atomic_write_file(path, body);
}

}  // namespace qsep
