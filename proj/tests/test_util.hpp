#ifndef QSEP_TEST_UTIL_HPP
#define QSEP_TEST_UTIL_HPP

#include <cmath>

#include "qsep/core.hpp"
#include "qsep/types.hpp"

namespace qsep::test {

/// |Phi+><Phi+| on two qubits.
inline DensityMatrix bell_state() {
  BipartiteDims d(2, 2);
  Vector v = Vector::Zero(4);
  v(0) = 1.0 / std::sqrt(2.0);
  v(3) = 1.0 / std::sqrt(2.0);
  return DensityMatrix{v * v.adjoint(), d};
}

/// Werner state t |Phi+><Phi+| + (1-t) I/4; separable iff t <= 1/3.
inline DensityMatrix werner(double t) {
  DensityMatrix bell = bell_state();
  return DensityMatrix{t * bell.entries + (1.0 - t) * Matrix::Identity(4, 4) / 4.0, bell.dims};
}

inline DensityMatrix maximally_mixed(const BipartiteDims& dims) {
  const int p = dims.p();
  return DensityMatrix{Matrix::Identity(p, p) / static_cast<double>(p), dims};
}

}  // namespace qsep::test

#endif
