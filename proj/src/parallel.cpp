#include "qsep/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <string>

namespace qsep {

unsigned effective_threads(unsigned requested) {
  unsigned hw = static_cast<unsigned>(std::max(1, omp_get_max_threads()));
  if (const char* env = std::getenv("QSEP_THREADS")) {
    unsigned cap = static_cast<unsigned>(std::max(1, std::atoi(env)));
    hw = std::min(hw, cap);
  }
  if (requested == 0) return hw;
  return std::min(requested, hw);
}

namespace detail {

void parallel_for_impl(std::size_t n, unsigned threads, void (*fn)(std::size_t, void*), void* ctx) {
  unsigned t = effective_threads(threads);
  if (t <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i, ctx);
    return;
  }
#pragma omp parallel for schedule(dynamic, 1) num_threads(t)
  for (long long i = 0; i < static_cast<long long>(n); ++i) {
    fn(static_cast<std::size_t>(i), ctx);
  }
}

}  // namespace detail
}  // namespace qsep
