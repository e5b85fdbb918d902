#ifndef QSEP_EXPERIMENTS_HPP
#define QSEP_EXPERIMENTS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qsep/datagen.hpp"
#include "qsep/features.hpp"
#include "qsep/svm.hpp"

namespace qsep {

struct ClassScore {
  double mean = 0.0;
  double std_dev = 0.0;
  int n_test = 0;
};

/// Per-class recall (fraction of the class's test samples predicted
/// correctly, with both entangled classes mapping to +1). Keys: "SEP",
/// "PPT_ENT", "NPPT_ENT" and "FW" when FW data are present.
struct EvalReport {
  std::map<std::string, ClassScore> per_class;
  KernelSpec selected_kernel;
  double selected_c = 0.0;
};

struct AugmentConfig {
  int n_seeds = 10;
  double unitary_fraction = 0.5;
};

struct ExperimentConfig {
  // Per-class training-set size; 0 = use everything available (balanced to
  // the smallest class between SEP and the assembled entangled class).
  int n_train_per_class = 0;
  int folds = 5;
  std::vector<KernelSpec> kernel_grid = default_kernel_grid();
  std::vector<double> c_grid = default_c_grid();
  int repetitions = 1;
  unsigned threads = 0;
};

/// The paper-style experiment: assemble the entangled training class with
/// `ppt_ratio` of it drawn from PPT_ENT samples (augmented from a few seeds
/// when `augment_config` is given, subsampled otherwise) and the rest from
/// NPPT_ENT, featurize, select (kernel, C) by stratified CV, train, and score
/// per class on `test`. Repeats with derived seeds; scores are mean +- std
/// over repetitions.
EvalReport run_experiment(const std::vector<LabeledSample>& train,
                          const std::vector<LabeledSample>& test, double ppt_ratio,
                          const std::optional<AugmentConfig>& augment_config,
                          const ExperimentConfig& config, std::uint64_t seed);

/// Trains one model the same way a single run_experiment repetition would and
/// returns it (for serialization / the k-sweep).
KernelModel train_classifier(const std::vector<LabeledSample>& train, double ppt_ratio,
                             const std::optional<AugmentConfig>& augment_config,
                             const ExperimentConfig& config, std::uint64_t seed,
                             CvResult* cv_out = nullptr);

struct KSweepRow {
  int k = 0;
  double ratio_predicted_separable = 0.0;
  double ratio_ppt = 0.0;
  double ratio_ball = 0.0;
};

/// For each k: draw n_per_k random mixtures and record the fraction the model
/// predicts separable, the fraction passing the PPT test, and the fraction
/// inside the separable ball.
std::vector<KSweepRow> k_sweep(const KernelModel& model, const BipartiteDims& dims,
                               const std::vector<int>& k_values, int n_per_k, std::uint64_t seed,
                               unsigned threads = 0);

struct FwLimitationConfig {
  ExperimentConfig experiment;
  FwConfig fw;
  int n_fw_train = 0;  // 0 = same as the per-class training size
  int n_fw_test = 0;   // 0 = same as the test SEP count
};

/// The FW-data failure-mode experiment: separable states produced by running
/// the solver on entangled inputs join the test set (and the training set when
/// `include_fw_in_train`); the report gains an "FW" row.
EvalReport fw_limitation_experiment(const std::vector<LabeledSample>& train,
                                    const std::vector<LabeledSample>& test,
                                    bool include_fw_in_train, const FwLimitationConfig& config,
                                    std::uint64_t seed);

// CSV emitters for the figure/report subcommands (17-digit floats, header row).
void write_error_curve_csv(const std::string& path, const std::vector<ErrorCurvePoint>& curve);
void write_k_sweep_csv(const std::string& path, const std::vector<KSweepRow>& rows);
void write_eval_report_csv(const std::string& path, const EvalReport& report);

}  // namespace qsep

#endif
