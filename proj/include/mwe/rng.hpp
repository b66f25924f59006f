#pragma once

// Deterministic random streams (splitmix64).  Every randomized routine takes
// an explicit seed and derives per-task substreams, so results are
// bit-reproducible regardless of scheduling.

#include <cstdint>

namespace mwe::rng {

inline uint64_t mix(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// derive an independent substream id
inline uint64_t derive(uint64_t seed, uint64_t stream) {
  return mix(seed + 0x9e3779b97f4a7c15ULL * (stream + 1));
}

class Stream {
 public:
  explicit Stream(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }
  double uniform() { return (next() >> 11) * 0x1.0p-53; }  // [0, 1)
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  double rademacher() { return (next() & 1) ? 1.0 : -1.0; }
  int index(int n) { return static_cast<int>(next() % static_cast<uint64_t>(n)); }

 private:
  uint64_t state_;
};

}  // namespace mwe::rng
