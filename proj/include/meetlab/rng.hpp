#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace meetlab {

// splitmix64 step; used both as a standalone mixer and to derive
// independent per-sample streams from a master seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed for stream `index` under `master`. Streams derived this way are
// independent of scheduling order, which keeps parallel batches reproducible.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t s = master;
  std::uint64_t a = splitmix64(s);
  s ^= index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL;
  std::uint64_t b = splitmix64(s);
  return a ^ (b + 0x9e3779b97f4a7c15ULL * (index + 1));
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

// Uniform double in (0,1]; hand-rolled so results do not depend on the
// standard library's distribution implementation.
inline double uniform_unit(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

inline double exponential(std::mt19937_64& rng, double rate) {
  return -std::log(uniform_unit(rng)) / rate;
}

inline std::uint32_t uniform_below(std::mt19937_64& rng, std::uint32_t n) {
  // Lemire-style rejection; exact uniformity.
  std::uint64_t threshold = (-static_cast<std::uint64_t>(n)) % n;
  for (;;) {
    std::uint64_t lo = static_cast<std::uint32_t>(rng());
    if (lo >= threshold) {
      return static_cast<std::uint32_t>(lo % n);
    }
  }
}

}  // namespace meetlab
