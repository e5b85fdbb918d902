#include "qsep/svm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "qsep/parallel.hpp"
#include "qsep/rng.hpp"

namespace qsep {

double KernelSpec::operator()(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  if (kind == KernelKind::GAUSSIAN) {
    return std::exp(-gamma * (x - y).squaredNorm());
  }
  return std::pow(x.dot(y) + coef0, degree);
}

std::string KernelSpec::describe() const {
  char buf[96];
  if (kind == KernelKind::GAUSSIAN) {
    std::snprintf(buf, sizeof(buf), "gaussian(gamma=%g)", gamma);
  } else {
    std::snprintf(buf, sizeof(buf), "poly(degree=%d,coef0=%g)", degree, coef0);
  }
  return buf;
}

void validate_kernel(const KernelSpec& k) {
  if (k.kind == KernelKind::GAUSSIAN && !(k.gamma > 0.0)) {
    throw std::invalid_argument("KernelSpec: gamma must be positive");
  }
  if (k.kind == KernelKind::POLYNOMIAL && k.degree < 1) {
    throw std::invalid_argument("KernelSpec: degree must be >= 1");
  }
}

KernelModel svm_train(const std::vector<Eigen::VectorXd>& features, const std::vector<int>& labels,
                      const KernelSpec& kernel, double c, double tol, std::uint64_t seed) {
  validate_kernel(kernel);
  const int n = static_cast<int>(features.size());
  if (n < 2 || labels.size() != features.size()) {
    throw std::invalid_argument("svm_train: need >= 2 labeled samples");
  }
  if (!(c > 0.0)) throw std::invalid_argument("svm_train: C must be positive");
  const Eigen::Index dim = features.front().size();
  bool has_pos = false, has_neg = false;
  for (int i = 0; i < n; ++i) {
    if (labels[i] != 1 && labels[i] != -1) throw std::invalid_argument("svm_train: labels must be +-1");
    if (features[i].size() != dim) throw std::invalid_argument("svm_train: inconsistent feature dimension");
    if (!features[i].allFinite()) throw std::invalid_argument("svm_train: non-finite feature value");
    (labels[i] == 1 ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) throw std::invalid_argument("svm_train: both classes must be present");

  // Full kernel matrix; n stays in the few-thousand range here.
  Eigen::MatrixXd k_mat(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      double v = kernel(features[i], features[j]);
      k_mat(i, j) = v;
      k_mat(j, i) = v;
    }
  }

  // Minimize 1/2 a^T Q a - e^T a, Q_ij = y_i y_j K_ij, 0 <= a <= C, y^T a = 0.
  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);  // grad = Q a - e
  const auto y = [&](int i) { return static_cast<double>(labels[i]); };

  const long long max_pair_steps = std::max<long long>(10000000LL, 100LL * n);
  long long steps = 0;
  double m_up = 0.0, m_low = 0.0;
  while (steps++ < max_pair_steps) {
    // Maximal violating pair.
    int i = -1, j = -1;
    m_up = -std::numeric_limits<double>::infinity();
    m_low = std::numeric_limits<double>::infinity();
    for (int t = 0; t < n; ++t) {
      const double yg = -y(t) * grad[t];
      const bool in_up = (labels[t] == 1 && alpha[t] < c) || (labels[t] == -1 && alpha[t] > 0.0);
      const bool in_low = (labels[t] == -1 && alpha[t] < c) || (labels[t] == 1 && alpha[t] > 0.0);
      if (in_up && yg > m_up) {
        m_up = yg;
        i = t;
      }
      if (in_low && yg < m_low) {
        m_low = yg;
        j = t;
      }
    }
    if (i < 0 || j < 0 || m_up - m_low < tol) break;

    // Step along d = y_i e_i - y_j e_j, exact minimization with box clipping.
    double quad = k_mat(i, i) + k_mat(j, j) - 2.0 * k_mat(i, j);
    if (quad <= 1e-12) quad = 1e-12;
    double step = (m_up - m_low) / quad;
    if (labels[i] == 1) step = std::min(step, c - alpha[i]);
    else step = std::min(step, alpha[i]);
    if (labels[j] == 1) step = std::min(step, alpha[j]);
    else step = std::min(step, c - alpha[j]);

    alpha[i] += y(i) * step;
    alpha[j] -= y(j) * step;
    for (int t = 0; t < n; ++t) grad[t] += step * y(t) * (k_mat(t, i) - k_mat(t, j));
  }

  // Bias from the free support vectors; midpoint of the violation interval
  // when none are free. -y_t grad_t equals y_t - sum_j a_j y_j K_jt.
  double bias = 0.0;
  int n_free = 0;
  for (int t = 0; t < n; ++t) {
    if (alpha[t] > 0.0 && alpha[t] < c) {
      bias += -y(t) * grad[t];
      ++n_free;
    }
  }
  bias = (n_free > 0) ? bias / n_free : 0.5 * (m_up + m_low);

  KernelModel model;
  model.kernel = kernel;
  model.bias = bias;
  model.training_meta.c = c;
  model.training_meta.seed = seed;
  for (int t = 0; t < n; ++t) {
    if (alpha[t] > 0.0) {
      model.support_vectors.push_back(features[t]);
      model.dual_coefs.push_back(y(t) * alpha[t]);
    }
  }
  return model;
}

Prediction svm_predict(const KernelModel& model, const Eigen::VectorXd& x) {
  if (!model.support_vectors.empty() && model.support_vectors.front().size() != x.size()) {
    throw std::invalid_argument("svm_predict: feature dimension mismatch");
  }
  double value = model.bias;
  for (std::size_t i = 0; i < model.support_vectors.size(); ++i) {
    value += model.dual_coefs[i] * model.kernel(model.support_vectors[i], x);
  }
  return {value < 0.0 ? -1 : 1, value};
}

namespace {

std::vector<std::vector<int>> stratified_folds(const std::vector<int>& labels, int folds,
                                               std::uint64_t seed) {
  std::vector<int> pos_idx, neg_idx;
  for (int i = 0; i < static_cast<int>(labels.size()); ++i) {
    (labels[i] == 1 ? pos_idx : neg_idx).push_back(i);
  }
  if (static_cast<int>(pos_idx.size()) < folds || static_cast<int>(neg_idx.size()) < folds) {
    throw std::invalid_argument("cross_validate: fewer samples than folds in a class");
  }
  Rng rng = make_rng(seed);
  std::shuffle(pos_idx.begin(), pos_idx.end(), rng);
  std::shuffle(neg_idx.begin(), neg_idx.end(), rng);
  std::vector<std::vector<int>> fold_idx(folds);
  for (std::size_t i = 0; i < pos_idx.size(); ++i) fold_idx[i % folds].push_back(pos_idx[i]);
  for (std::size_t i = 0; i < neg_idx.size(); ++i) fold_idx[i % folds].push_back(neg_idx[i]);
  return fold_idx;
}

}  // namespace

CvResult cross_validate(const std::vector<Eigen::VectorXd>& features, const std::vector<int>& labels,
                        const std::vector<KernelSpec>& kernel_grid, const std::vector<double>& c_grid,
                        int folds, std::uint64_t seed, unsigned threads) {
  if (folds < 2) throw std::invalid_argument("cross_validate: folds must be >= 2");
  if (kernel_grid.empty() || c_grid.empty()) throw std::invalid_argument("cross_validate: empty grid");
  auto fold_idx = stratified_folds(labels, folds, seed);

  struct Candidate {
    std::size_t kernel_index;
    std::size_t c_index;
  };
  std::vector<Candidate> candidates;
  for (std::size_t ki = 0; ki < kernel_grid.size(); ++ki)
    for (std::size_t ci = 0; ci < c_grid.size(); ++ci) candidates.push_back({ki, ci});

  std::vector<std::vector<double>> fold_scores(candidates.size(), std::vector<double>(folds, 0.0));
  parallel_for(candidates.size() * folds, threads, [&](std::size_t job) {
    const std::size_t cand = job / folds;
    const int fold = static_cast<int>(job % folds);
    const KernelSpec& kernel = kernel_grid[candidates[cand].kernel_index];
    const double c = c_grid[candidates[cand].c_index];

    std::vector<Eigen::VectorXd> train_x;
    std::vector<int> train_y;
    for (int f = 0; f < folds; ++f) {
      if (f == fold) continue;
      for (int idx : fold_idx[f]) {
        train_x.push_back(features[idx]);
        train_y.push_back(labels[idx]);
      }
    }
    KernelModel model = svm_train(train_x, train_y, kernel, c, 1e-3, seed);
    int correct = 0;
    for (int idx : fold_idx[fold]) {
      if (svm_predict(model, features[idx]).label == labels[idx]) ++correct;
    }
    fold_scores[cand][fold] = static_cast<double>(correct) / fold_idx[fold].size();
  });

  CvResult result;
  double best_mean = -1.0;
  std::size_t best = 0;
  for (std::size_t cand = 0; cand < candidates.size(); ++cand) {
    double mean = std::accumulate(fold_scores[cand].begin(), fold_scores[cand].end(), 0.0) / folds;
    const double c = c_grid[candidates[cand].c_index];
    const double best_c = c_grid[candidates[best].c_index];
    if (mean > best_mean || (mean == best_mean && c < best_c)) {
      best_mean = mean;
      best = cand;
    }
    for (int f = 0; f < folds; ++f) {
      result.table.push_back({candidates[cand].kernel_index, c, f, fold_scores[cand][f]});
    }
  }
  result.best_kernel = kernel_grid[candidates[best].kernel_index];
  result.best_c = c_grid[candidates[best].c_index];
  return result;
}

std::vector<KernelSpec> default_kernel_grid() {
  std::vector<KernelSpec> grid;
  for (int e = -7; e <= 3; e += 2) {
    grid.push_back({KernelKind::GAUSSIAN, std::ldexp(1.0, e), 0, 0.0});
  }
  for (int degree : {2, 3}) {
    grid.push_back({KernelKind::POLYNOMIAL, 0.0, degree, 1.0});
  }
  return grid;
}

std::vector<double> default_c_grid() {
  std::vector<double> grid;
  for (int e = -3; e <= 7; e += 2) grid.push_back(std::ldexp(1.0, e));
  return grid;
}

// --- model file (layout in docs/model-format.md) ---

namespace {

constexpr char kMagic[8] = {'Q', 'S', 'E', 'P', 'S', 'V', 'M', '\0'};

template <class T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <class T>
T take(std::ifstream& in) {
  T v;
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("model file truncated");
  return v;
}

}  // namespace

void save_model(const KernelModel& model, const std::string& path) {
  std::string out;
  out.append(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, 1);  // version
  put<std::uint32_t>(out, model.kernel.kind == KernelKind::GAUSSIAN ? 0 : 1);
  put<double>(out, model.kernel.gamma);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(model.kernel.degree));
  put<double>(out, model.kernel.coef0);
  put<double>(out, model.bias);
  put<double>(out, model.training_meta.c);
  put<std::uint64_t>(out, model.training_meta.seed);
  put<std::uint64_t>(out, model.training_meta.fold_scores.size());
  for (double s : model.training_meta.fold_scores) put<double>(out, s);
  const std::uint64_t n_sv = model.support_vectors.size();
  const std::uint64_t dim = n_sv ? static_cast<std::uint64_t>(model.support_vectors.front().size()) : 0;
  put<std::uint64_t>(out, n_sv);
  put<std::uint64_t>(out, dim);
  for (double d : model.dual_coefs) put<double>(out, d);
  for (const auto& sv : model.support_vectors) {
    for (Eigen::Index i = 0; i < sv.size(); ++i) put<double>(out, sv(i));
  }

  std::ofstream f(path + ".tmp", std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path + ".tmp for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  f.close();
  if (!f) throw std::runtime_error("write failed: " + path);
  std::rename((path + ".tmp").c_str(), path.c_str());
}

KernelModel load_model(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open model file " + path);
  char magic[8];
  f.read(magic, 8);
  if (!f || std::memcmp(magic, kMagic, 8) != 0) throw std::runtime_error("bad model magic");
  if (take<std::uint32_t>(f) != 1) throw std::runtime_error("unsupported model version");

  KernelModel model;
  model.kernel.kind = take<std::uint32_t>(f) == 0 ? KernelKind::GAUSSIAN : KernelKind::POLYNOMIAL;
  model.kernel.gamma = take<double>(f);
  model.kernel.degree = static_cast<int>(take<std::uint32_t>(f));
  model.kernel.coef0 = take<double>(f);
  model.bias = take<double>(f);
  model.training_meta.c = take<double>(f);
  model.training_meta.seed = take<std::uint64_t>(f);
  const auto n_scores = take<std::uint64_t>(f);
  model.training_meta.fold_scores.resize(n_scores);
  for (auto& s : model.training_meta.fold_scores) s = take<double>(f);
  const auto n_sv = take<std::uint64_t>(f);
  const auto dim = take<std::uint64_t>(f);
  model.dual_coefs.resize(n_sv);
  for (auto& d : model.dual_coefs) d = take<double>(f);
  model.support_vectors.resize(n_sv);
  for (auto& sv : model.support_vectors) {
    sv.resize(static_cast<Eigen::Index>(dim));
    for (std::uint64_t i = 0; i < dim; ++i) sv(static_cast<Eigen::Index>(i)) = take<double>(f);
  }
  return model;
}

}  // namespace qsep
