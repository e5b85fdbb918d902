#ifndef QSEP_SVM_HPP
#define QSEP_SVM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qsep {

enum class KernelKind { GAUSSIAN, POLYNOMIAL };

/// Kernel on feature vectors: Gaussian k(x,y) = exp(-gamma ||x-y||^2) or
/// polynomial k(x,y) = (x.y + coef0)^degree.
struct KernelSpec {
  KernelKind kind = KernelKind::GAUSSIAN;
  double gamma = 1.0;
  int degree = 3;
  double coef0 = 1.0;

  double operator()(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
  std::string describe() const;
};

void validate_kernel(const KernelSpec& k);

struct TrainingMeta {
  double c = 1.0;
  std::uint64_t seed = 0;
  std::vector<double> fold_scores;
};

/// Trained kernel classifier: decision(x) = sum_i dual_coefs[i] k(sv_i, x) + bias,
/// dual_coefs[i] = y_i alpha_i over the active support vectors.
struct KernelModel {
  std::vector<Eigen::VectorXd> support_vectors;
  std::vector<double> dual_coefs;
  double bias = 0.0;
  KernelSpec kernel;
  TrainingMeta training_meta;
};

struct Prediction {
  int label = 1;  // -1 separable, +1 entangled; exact zero decision -> +1
  double decision_value = 0.0;
};

/// Soft-margin kernel SVM dual solved by sequential minimal optimization with
/// maximal-violating-pair working-set selection, stopping at KKT violation
/// below `tol`. Deterministic given the data order. Throws on single-class or
/// non-finite input.
KernelModel svm_train(const std::vector<Eigen::VectorXd>& features, const std::vector<int>& labels,
                      const KernelSpec& kernel, double c, double tol = 1e-3, std::uint64_t seed = 0);

Prediction svm_predict(const KernelModel& model, const Eigen::VectorXd& x);

struct CvCell {
  std::size_t kernel_index = 0;
  double c = 0.0;
  int fold = 0;
  double accuracy = 0.0;
};

struct CvResult {
  KernelSpec best_kernel;
  double best_c = 0.0;
  std::vector<CvCell> table;
};

/// Stratified k-fold model selection over a (kernel, C) grid, maximizing mean
/// validation accuracy; ties prefer smaller C, then earlier grid order.
/// Deterministic given the seed. Throws when any class has fewer samples than
/// folds.
CvResult cross_validate(const std::vector<Eigen::VectorXd>& features, const std::vector<int>& labels,
                        const std::vector<KernelSpec>& kernel_grid, const std::vector<double>& c_grid,
                        int folds, std::uint64_t seed, unsigned threads = 0);

/// Default search grids: gamma in 2^-7..2^3, C in 2^-3..2^7, polynomial
/// degrees 2 and 3.
std::vector<KernelSpec> default_kernel_grid();
std::vector<double> default_c_grid();

/// Binary model file with a fixed little-endian layout (see
/// docs/model-format.md); round-trips predictions bit-exactly.
void save_model(const KernelModel& model, const std::string& path);
KernelModel load_model(const std::string& path);

}  // namespace qsep

#endif
