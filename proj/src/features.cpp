#include "qsep/features.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <stdexcept>

#include "qsep/io_util.hpp"

namespace qsep {

namespace {

GellMannBasis build_basis(int p) {
  GellMannBasis basis;
  basis.p = p;
  basis.matrices.reserve(p * p - 1);
  auto unit = [p](int i, int j) {
    Matrix e = Matrix::Zero(p, p);
    e(i, j) = 1.0;
    return e;
  };
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) basis.matrices.push_back(unit(i, j) + unit(j, i));
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j)
      basis.matrices.push_back(cxd(0, -1) * unit(i, j) + cxd(0, 1) * unit(j, i));
  for (int k = 1; k < p; ++k) {
    Matrix d = Matrix::Zero(p, p);
    for (int i = 0; i < k; ++i) d(i, i) = 1.0;
    d(k, k) = -static_cast<double>(k);
    basis.matrices.push_back(std::sqrt(2.0 / (k * (k + 1.0))) * d);
  }
  return basis;
}

}  // namespace

const GellMannBasis& gellmann_basis(int p) {
  if (p < 2) throw std::invalid_argument("gellmann_basis: p must be >= 2");
  static std::mutex mutex;
  static std::map<int, GellMannBasis> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(p);
  if (it == cache.end()) it = cache.emplace(p, build_basis(p)).first;
  return it->second;
}

BlochVector bloch_vector(const DensityMatrix& rho, const GellMannBasis& basis) {
  const int p = basis.p;
  if (rho.p() != p) throw std::invalid_argument("bloch_vector: dimension mismatch");
  const Matrix& m = rho.entries;
  BlochVector out;
  out.p = p;
  out.beta.resize(p * p - 1);
  int l = 0;
  auto put = [&](cxd trace_value) {
    if (std::abs(trace_value.imag()) > 1e-10) {
      throw std::runtime_error("bloch_vector: trace has imaginary residual above 1e-10");
    }
    out.beta(l++) = trace_value.real();
  };
  // tr(S_ij rho) = rho_ji + rho_ij, tr(A_ij rho) = i(rho_ij - rho_ji).
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) put(m(j, i) + m(i, j));
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) put(cxd(0, 1) * (m(i, j) - m(j, i)));
  for (int k = 1; k < p; ++k) {
    cxd acc = 0.0;
    for (int i = 0; i < k; ++i) acc += m(i, i);
    acc -= static_cast<double>(k) * m(k, k);
    put(std::sqrt(2.0 / (k * (k + 1.0))) * acc);
  }
  return out;
}

Matrix bloch_reconstruct(const BlochVector& beta, const GellMannBasis& basis) {
  const int p = basis.p;
  if (beta.p != p) throw std::invalid_argument("bloch_reconstruct: dimension mismatch");
  Matrix rho = Matrix::Identity(p, p) / static_cast<double>(p);
  for (int l = 0; l < p * p - 1; ++l) rho += 0.5 * beta.beta(l) * basis.matrices[l];
  return rho;
}

void write_features_csv(const std::string& path, const std::vector<LabeledSample>& samples) {
  if (samples.empty()) throw std::invalid_argument("write_features_csv: no samples");
  const int p = samples.front().rho.p();
  const GellMannBasis& basis = gellmann_basis(p);

  std::string body;
  for (int l = 1; l <= p * p - 1; ++l) {
    body += "beta_" + std::to_string(l) + ",";
  }
  body += "label,class\n";
  for (const auto& s : samples) {
    if (s.rho.p() != p) throw std::invalid_argument("write_features_csv: mixed dims");
    BlochVector beta = bloch_vector(s.rho, basis);
    for (int l = 0; l < p * p - 1; ++l) {
      body += format_double17(beta.beta(l));
      body += ',';
    }
    body += (s.label == ClassLabel::SEP) ? "-1" : "1";
    body += ',';
    body += to_string(s.label);
    body += '\n';
  }
  atomic_write_file(path, body);
}

}  // namespace qsep
