#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "qsep/rng.hpp"
#include "qsep/svm.hpp"

using namespace qsep;

namespace {

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

/// Two well-separated clusters in 2D.
void two_clusters(std::vector<Eigen::VectorXd>& x, std::vector<int>& y, int n_per, double spread,
                  std::uint64_t seed) {
  Rng rng = make_rng(seed);
  for (int i = 0; i < n_per; ++i) {
    x.push_back(vec2(-5 + spread * standard_normal(rng), spread * standard_normal(rng)));
    y.push_back(-1);
    x.push_back(vec2(+5 + spread * standard_normal(rng), spread * standard_normal(rng)));
    y.push_back(+1);
  }
}

}  // namespace

TEST_CASE("svm_train separates linearly separable clusters") {
  std::vector<Eigen::VectorXd> x;
  std::vector<int> y;
  two_clusters(x, y, 20, 0.3, 1);
  KernelSpec linearish{KernelKind::POLYNOMIAL, 0.0, 1, 1.0};
  KernelModel model = svm_train(x, y, linearish, 1.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(svm_predict(model, x[i]).label == y[i]);
  }
}

TEST_CASE("svm_train solves XOR with a Gaussian kernel") {
  std::vector<Eigen::VectorXd> x{vec2(0, 0), vec2(1, 1), vec2(0, 1), vec2(1, 0)};
  std::vector<int> y{-1, -1, +1, +1};
  KernelSpec gauss{KernelKind::GAUSSIAN, 1.0, 0, 0.0};
  KernelModel model = svm_train(x, y, gauss, 10.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    auto pred = svm_predict(model, x[i]);
    CHECK(pred.label == y[i]);
    // Decision value cross-checked by direct kernel expansion.
    double direct = model.bias;
    for (std::size_t s = 0; s < model.support_vectors.size(); ++s) {
      direct += model.dual_coefs[s] * std::exp(-(model.support_vectors[s] - x[i]).squaredNorm());
    }
    CHECK(pred.decision_value == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("svm dual feasibility and KKT conditions") {
  std::vector<Eigen::VectorXd> x;
  std::vector<int> y;
  two_clusters(x, y, 40, 2.5, 3);  // overlapping clusters so some alpha hit C
  const double c = 2.0, tol = 1e-3;
  KernelSpec gauss{KernelKind::GAUSSIAN, 0.5, 0, 0.0};
  KernelModel model = svm_train(x, y, gauss, c, tol);

  double sum = 0.0;
  for (double d : model.dual_coefs) {
    CHECK(std::abs(d) > 0.0);
    CHECK(std::abs(d) <= c + 1e-12);
    sum += d;
  }
  CHECK(std::abs(sum) <= 1e-8);

  // KKT with tolerance: free SVs sit on the margin, bound SVs inside it, and
  // non-SVs outside.
  auto margin = [&](const Eigen::VectorXd& xi, int yi) {
    return yi * svm_predict(model, xi).decision_value;
  };
  std::vector<bool> is_sv(x.size(), false);
  std::vector<double> alpha_of(x.size(), 0.0);
  {
    std::size_t si = 0;
    for (std::size_t i = 0; i < x.size() && si < model.support_vectors.size(); ++i) {
      if (model.support_vectors[si] == x[i]) {
        is_sv[i] = true;
        alpha_of[i] = std::abs(model.dual_coefs[si]);
        ++si;
      }
    }
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    double m = margin(x[i], y[i]);
    if (!is_sv[i]) {
      CHECK(m >= 1.0 - tol);
    } else if (alpha_of[i] < c - 1e-12) {
      CHECK(m == doctest::Approx(1.0).epsilon(2 * tol));
    } else {
      CHECK(m <= 1.0 + tol);
    }
  }
}

TEST_CASE("svm_train input validation") {
  std::vector<Eigen::VectorXd> x{vec2(0, 0), vec2(1, 1)};
  KernelSpec gauss{KernelKind::GAUSSIAN, 1.0, 0, 0.0};
  CHECK_THROWS_AS(svm_train(x, {1, 1}, gauss, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(svm_train(x, {1, -2}, gauss, 1.0), std::invalid_argument);
  std::vector<Eigen::VectorXd> bad{vec2(0, 0), vec2(std::nan(""), 1)};
  CHECK_THROWS_AS(svm_train(bad, {1, -1}, gauss, 1.0), std::invalid_argument);
  KernelSpec bad_kernel{KernelKind::GAUSSIAN, -1.0, 0, 0.0};
  CHECK_THROWS_AS(svm_train(x, {1, -1}, bad_kernel, 1.0), std::invalid_argument);
}

TEST_CASE("svm_predict conventions") {
  std::vector<Eigen::VectorXd> x;
  std::vector<int> y;
  two_clusters(x, y, 10, 0.3, 5);
  KernelSpec gauss{KernelKind::GAUSSIAN, 0.25, 0, 0.0};
  KernelModel model = svm_train(x, y, gauss, 1.0);

  SUBCASE("bias shift moves every decision value by exactly delta") {
    Eigen::VectorXd probe = vec2(0.5, -0.2);
    double before = svm_predict(model, probe).decision_value;
    KernelModel shifted = model;
    shifted.bias += 0.125;
    CHECK(svm_predict(shifted, probe).decision_value == before + 0.125);
  }
  SUBCASE("support-vector permutation leaves predictions unchanged") {
    KernelModel perm = model;
    std::reverse(perm.support_vectors.begin(), perm.support_vectors.end());
    std::reverse(perm.dual_coefs.begin(), perm.dual_coefs.end());
    Eigen::VectorXd probe = vec2(1.0, 1.0);
    CHECK(svm_predict(perm, probe).decision_value ==
          doctest::Approx(svm_predict(model, probe).decision_value).epsilon(1e-12));
  }
  SUBCASE("zero decision value predicts +1") {
    KernelModel trivial;
    trivial.kernel = gauss;
    trivial.bias = 0.0;
    CHECK(svm_predict(trivial, vec2(0, 0)).label == 1);
  }
  SUBCASE("dimension mismatch rejected") {
    Eigen::VectorXd bad(3);
    bad << 1, 2, 3;
    CHECK_THROWS_AS(svm_predict(model, bad), std::invalid_argument);
  }
}

TEST_CASE("cross_validate selection and fold structure") {
  std::vector<Eigen::VectorXd> x;
  std::vector<int> y;
  two_clusters(x, y, 25, 0.4, 7);

  SUBCASE("single grid point is returned with a full fold table") {
    KernelSpec gauss{KernelKind::GAUSSIAN, 1.0, 0, 0.0};
    auto cv = cross_validate(x, y, {gauss}, {2.0}, 5, 42);
    CHECK(cv.best_c == 2.0);
    CHECK(cv.best_kernel.kind == KernelKind::GAUSSIAN);
    CHECK(cv.table.size() == 5);
  }
  SUBCASE("duplicated grid point: first occurrence wins") {
    KernelSpec g1{KernelKind::GAUSSIAN, 1.0, 0, 0.0};
    KernelSpec g2{KernelKind::GAUSSIAN, 1.0, 0, 0.0};
    auto cv = cross_validate(x, y, {g1, g2}, {2.0, 2.0}, 3, 42);
    CHECK(cv.best_c == 2.0);
    CHECK(cv.table.size() == 4 * 3);
  }
  SUBCASE("underfitting gamma loses to the better one") {
    // At gamma ~ 1e-8 every kernel value is ~1 and the model cannot separate;
    // CV must pick the larger gamma.
    KernelSpec tiny{KernelKind::GAUSSIAN, 1e-8, 0, 0.0};
    KernelSpec good{KernelKind::GAUSSIAN, 0.5, 0, 0.0};
    auto cv = cross_validate(x, y, {tiny, good}, {1.0}, 5, 42);
    CHECK(cv.best_kernel.gamma == 0.5);
  }
  SUBCASE("fewer samples than folds in a class rejected") {
    std::vector<Eigen::VectorXd> small{vec2(0, 0), vec2(1, 1), vec2(2, 2)};
    std::vector<int> sy{1, -1, 1};
    KernelSpec gauss{KernelKind::GAUSSIAN, 1.0, 0, 0.0};
    CHECK_THROWS_AS(cross_validate(small, sy, {gauss}, {1.0}, 3, 1), std::invalid_argument);
  }
  SUBCASE("deterministic across thread counts") {
    KernelSpec g1{KernelKind::GAUSSIAN, 0.5, 0, 0.0};
    KernelSpec g2{KernelKind::GAUSSIAN, 2.0, 0, 0.0};
    auto a = cross_validate(x, y, {g1, g2}, {0.5, 4.0}, 4, 9, 1);
    auto b = cross_validate(x, y, {g1, g2}, {0.5, 4.0}, 4, 9, 2);
    CHECK(a.best_c == b.best_c);
    CHECK(a.best_kernel.gamma == b.best_kernel.gamma);
    REQUIRE(a.table.size() == b.table.size());
    for (std::size_t i = 0; i < a.table.size(); ++i) {
      CHECK(a.table[i].accuracy == b.table[i].accuracy);
    }
  }
}

TEST_CASE("model save/load round-trips predictions bit-exactly") {
  std::vector<Eigen::VectorXd> x;
  std::vector<int> y;
  two_clusters(x, y, 15, 1.0, 11);
  KernelSpec poly{KernelKind::POLYNOMIAL, 0.0, 3, 1.0};
  KernelModel model = svm_train(x, y, poly, 4.0);
  model.training_meta.fold_scores = {0.5, 0.75, 1.0};

  const std::string path = "model_test.qsvm";
  save_model(model, path);
  KernelModel loaded = load_model(path);

  CHECK(loaded.kernel.kind == model.kernel.kind);
  CHECK(loaded.kernel.degree == model.kernel.degree);
  CHECK(loaded.bias == model.bias);
  CHECK(loaded.training_meta.c == model.training_meta.c);
  CHECK(loaded.training_meta.fold_scores == model.training_meta.fold_scores);
  REQUIRE(loaded.support_vectors.size() == model.support_vectors.size());
  Rng rng = make_rng(1);
  for (int i = 0; i < 20; ++i) {
    Eigen::VectorXd probe = vec2(4 * standard_normal(rng), 4 * standard_normal(rng));
    CHECK(svm_predict(loaded, probe).decision_value == svm_predict(model, probe).decision_value);
  }
  std::filesystem::remove(path);
}
