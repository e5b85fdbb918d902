#ifndef QSEP_RNG_HPP
#define QSEP_RNG_HPP

#include <cstdint>
#include <random>

namespace qsep {

using Rng = std::mt19937_64;

// splitmix64 finalizer; the backbone of all seed derivation.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic seed tree: derive(base ^ stream_index), mixed so that nearby
// indices give unrelated streams. Batch kernels give every sample its own
// derived seed, which keeps results independent of thread count.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return mix64(base ^ index);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  return mix64(mix64(base ^ a) ^ b);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

inline double uniform_real(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double standard_normal(Rng& rng) {
  return std::normal_distribution<double>(0.0, 1.0)(rng);
}

inline double exponential(Rng& rng) {
  return std::exponential_distribution<double>(1.0)(rng);
}

}  // namespace qsep

#endif
