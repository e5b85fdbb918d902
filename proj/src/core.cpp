#include "qsep/core.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace qsep {

void validate_unit(const Vector& v) {
  if (std::abs(v.norm() - 1.0) > kUnitNormTol) {
    throw std::invalid_argument("state vector is not unit norm");
  }
}

void validate_density(const DensityMatrix& rho, bool check_psd) {
  const Matrix& m = rho.entries;
  if (m.rows() != rho.p() || m.cols() != rho.p()) {
    throw std::invalid_argument("density matrix shape does not match dims");
  }
  if (hermiticity_defect(m) > kHermitianTol) {
    throw std::invalid_argument("density matrix is not Hermitian within 1e-12");
  }
  if (std::abs(m.trace().real() - 1.0) > kTraceTol || std::abs(m.trace().imag()) > kTraceTol) {
    throw std::invalid_argument("density matrix trace is not 1 within 1e-12");
  }
  if (check_psd && hermitian_min_eigenvalue(m) < -kPsdTol) {
    throw std::invalid_argument("density matrix has eigenvalue below -1e-10");
  }
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Vector haar_unit_vector(int n, Rng& rng) {
  Vector v(n);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    double re = gauss(rng);
    double im = gauss(rng);
    v(i) = cxd(re, im);
  }
  v.normalize();
  return v;
}

PureState haar_random_pure(const BipartiteDims& dims, Rng& rng) {
  return PureState{haar_unit_vector(dims.p(), rng), dims};
}

Matrix random_density_mixture_matrix(int dim, int k, Rng& rng) {
  if (k < 1) throw std::invalid_argument("random_density_mixture: k must be >= 1");
  Matrix rho = Matrix::Zero(dim, dim);
  const double w = 1.0 / static_cast<double>(k);
  for (int i = 0; i < k; ++i) {
    Vector psi = haar_unit_vector(dim, rng);
    rho.noalias() += w * (psi * psi.adjoint());
  }
  return rho;
}

DensityMatrix random_density_mixture(const BipartiteDims& dims, int k, Rng& rng) {
  return DensityMatrix{random_density_mixture_matrix(dims.p(), k, rng), dims};
}

Eigen::VectorXd simplex_weights(int r, Rng& rng) {
  Eigen::VectorXd q(r);
  std::exponential_distribution<double> exp1(1.0);
  for (int i = 0; i < r; ++i) q(i) = exp1(rng);
  q /= q.sum();
  return q;
}

DensityMatrix random_separable(const BipartiteDims& dims, int r, Rng& rng) {
  IntRange ka{1, dims.p_a * dims.p_a};
  IntRange kb{1, dims.p_b * dims.p_b};
  return random_separable(dims, r, rng, ka, kb);
}

DensityMatrix random_separable(const BipartiteDims& dims, int r, Rng& rng,
                               const IntRange& k_a, const IntRange& k_b) {
  if (r < 1) throw std::invalid_argument("random_separable: r must be >= 1");
  Eigen::VectorXd q = simplex_weights(r, rng);
  Matrix rho = Matrix::Zero(dims.p(), dims.p());
  for (int j = 0; j < r; ++j) {
    Matrix sa = random_density_mixture_matrix(dims.p_a, k_a.draw(rng), rng);
    Matrix sb = random_density_mixture_matrix(dims.p_b, k_b.draw(rng), rng);
    rho.noalias() += q(j) * kron(sa, sb);
  }
  return DensityMatrix{std::move(rho), dims};
}

Matrix partial_transpose_b(const DensityMatrix& rho) {
  const int pa = rho.dims.p_a;
  const int pb = rho.dims.p_b;
  Matrix out(rho.p(), rho.p());
  for (int i = 0; i < pa; ++i)
    for (int j = 0; j < pa; ++j)
      out.block(i * pb, j * pb, pb, pb) = rho.entries.block(i * pb, j * pb, pb, pb).transpose();
  return out;
}

SchmidtTop schmidt_top(const PureState& state) {
  const int pa = state.dims.p_a;
  const int pb = state.dims.p_b;
  // Row-major reshape: M(i, j) = amplitudes[i*p_b + j].
  Matrix m(pa, pb);
  for (int i = 0; i < pa; ++i)
    for (int j = 0; j < pb; ++j) m(i, j) = state.amplitudes(i * pb + j);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SchmidtTop top;
  top.lambda1 = svd.singularValues()(0);
  top.a1 = svd.matrixU().col(0);
  // |s> = sum_k s_k |u_k> (x) |conj(v_k)>, so the B-side state is conj(V) col.
  top.b1 = svd.matrixV().col(0).conjugate();
  return top;
}

double hermitian_min_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

namespace {

std::pair<double, Vector> power_top_eigpair(const Matrix& m) {
  const int p = static_cast<int>(m.rows());
  // Shift makes the target eigenvalue the one of largest modulus.
  const double shift = static_cast<double>(p);
  Matrix shifted = m + shift * Matrix::Identity(p, p);
  // Deterministic start vector from a fixed-seed stream.
  Rng rng(0x51a7e5eedULL);
  Vector v = haar_unit_vector(p, rng);
  constexpr int kMaxIters = 10000;
  constexpr double kTol = 1e-10;
  double lambda = 0.0;
  for (int it = 0; it < kMaxIters; ++it) {
    Vector w = shifted * v;
    double norm = w.norm();
    if (norm == 0.0) break;  // m == -shift*I: any unit vector is an eigenvector
    v = w / norm;
    lambda = (v.adjoint() * shifted * v).value().real();
    if ((shifted * v - lambda * v).norm() <= kTol) break;
  }
  double eig = lambda - shift;
  if ((m * v - eig * v).norm() > 1e-8) {
    throw std::runtime_error("power iteration did not converge to tolerance");
  }
  return {eig, v};
}

}  // namespace

std::pair<double, Vector> hermitian_top_eigpair(const Matrix& m, EigMethod method) {
  if (m.rows() != m.cols()) throw std::invalid_argument("hermitian_top_eigpair: matrix must be square");
  if (hermiticity_defect(m) > 1e-10) {
    throw std::invalid_argument("hermitian_top_eigpair: input is not Hermitian within 1e-10");
  }
  if (method == EigMethod::Power) return power_top_eigpair(m);
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  const int last = static_cast<int>(m.rows()) - 1;
  return {es.eigenvalues()(last), es.eigenvectors().col(last)};
}

}  // namespace qsep
