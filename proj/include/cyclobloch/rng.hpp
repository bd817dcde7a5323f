#pragma once

#include <cstdint>
#include <numbers>

namespace cyclobloch {

/* Counter-based splittable generator: every drawn number is a pure hash
 * of (seed, realization, counter), so results do not depend on thread
 * scheduling or call order. */
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t counter_hash(uint64_t seed, uint64_t realization,
                             uint64_t counter) {
  uint64_t h = splitmix64(seed ^ 0x7c0fff3317a9d9b5ULL);
  h = splitmix64(h ^ realization);
  return splitmix64(h ^ counter);
}

/* Uniform in [0,1). */
inline double uniform01(uint64_t seed, uint64_t realization, uint64_t counter) {
  return (counter_hash(seed, realization, counter) >> 11) * 0x1.0p-53;
}

/* Uniform phase in [0, 2*pi). */
inline double uniform_phase(uint64_t seed, uint64_t realization,
                            uint64_t counter) {
  return 2.0 * std::numbers::pi * uniform01(seed, realization, counter);
}

}  // namespace cyclobloch
