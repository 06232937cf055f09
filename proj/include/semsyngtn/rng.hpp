#ifndef SEMSYNGTN_RNG_HPP_
#define SEMSYNGTN_RNG_HPP_

#include <cstdint>
#include <random>
#include <string_view>

namespace semsyngtn {

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::uint64_t mix64(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Independent stream per (seed, label); insertion order of callers is irrelevant.
inline std::mt19937_64 seeded_rng(std::uint64_t seed, std::string_view label) {
  return std::mt19937_64(mix64(seed ^ fnv1a64(label)));
}

inline std::mt19937_64 seeded_rng(std::uint64_t seed, std::string_view label, std::uint64_t n) {
  return std::mt19937_64(mix64(mix64(seed ^ fnv1a64(label)) + n));
}

}  // namespace semsyngtn

#endif  // SEMSYNGTN_RNG_HPP_
