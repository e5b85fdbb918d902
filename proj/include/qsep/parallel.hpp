#ifndef QSEP_PARALLEL_HPP
#define QSEP_PARALLEL_HPP

#include <cstddef>

namespace qsep {

// Worker count: 0 = auto (OpenMP max, capped by the QSEP_THREADS env var),
// 1 = serial reference path, n = exactly n workers.
unsigned effective_threads(unsigned requested = 0);

namespace detail {
void parallel_for_impl(std::size_t n, unsigned threads, void (*fn)(std::size_t, void*), void* ctx);
}

// Index-parallel loop. Every iteration must be independent and write only to
// its own slots; callers derive a per-index RNG seed so the result is
// bit-identical for any thread count, including the serial path.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& body) {
  auto thunk = [](std::size_t i, void* ctx) { (*static_cast<F*>(ctx))(i); };
  detail::parallel_for_impl(n, threads, thunk, &body);
}

}  // namespace qsep

#endif
