#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace cdops {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based generator: every draw is a pure function of (key, counters),
/// so results do not depend on evaluation order or thread scheduling.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(splitmix64(key ^ 0xcd0b5cdULL)) {}

  std::uint64_t bits(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) const {
    std::uint64_t h = key_;
    h = splitmix64(h ^ a);
    h = splitmix64(h ^ b);
    h = splitmix64(h ^ c);
    return h;
  }

  /// Uniform in [0, 1).
  double unit(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) const {
    return static_cast<double>(bits(a, b, c) >> 11) * 0x1.0p-53;
  }

  /// Uniform in [-1, 1).
  double symmetric(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) const {
    return 2.0 * unit(a, b, c) - 1.0;
  }

  /// Unit-modulus complex number with uniform angle.
  std::complex<double> phase(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) const {
    const double t = 6.283185307179586476925287 * unit(a, b, c);
    return {std::cos(t), std::sin(t)};
  }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
};

/// Stable hash of an integer tuple, for counter derivation and hash maps.
inline std::uint64_t hash_coords(const std::vector<std::int64_t>& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ (0x100000001b3ULL * c.size());
  for (std::int64_t v : c) {
    h ^= static_cast<std::uint64_t>(v);
    h *= 0x100000001b3ULL;
    h = splitmix64(h);
  }
  return h;
}

}  // namespace cdops
