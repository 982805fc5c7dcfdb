#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

namespace asyncsi {

// SplitMix64 finalizer. Used to derive independent stream seeds from a root
// seed plus a path of counters, so parallel trials started from one seed are
// reproducible and order-independent.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic random stream addressed by (seed, derivation path).
// The stream itself is std::mt19937_64, which the standard pins bit-exactly;
// doubles are produced by explicit bit manipulation, never through
// std::uniform_real_distribution (whose output is implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : key_(mix64(seed)), engine_(key_) {}

  static Rng derived(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t k = mix64(seed);
    for (std::uint64_t p : path) k = mix64(k ^ mix64(p + 0x9e3779b97f4a7c15ULL));
    return Rng(raw_key{}, k);
  }

  // Child stream for counter `id`; independent of this stream's position.
  Rng child(std::uint64_t id) const {
    return Rng(raw_key{}, mix64(key_ ^ mix64(id + 0x42d8680e260ec06bULL)));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1), 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return next_double() < p; }

  // Uniform integer in [0, n) via Lemire's multiply-shift (no rejection; the
  // bias at n << 2^64 is far below anything observable here).
  std::uint64_t index(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Inverse-CDF draw from an explicit probability vector.
  int sample(std::span<const double> probs) {
    double u = next_double();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
  }

 private:
  struct raw_key {};
  Rng(raw_key, std::uint64_t key) : key_(key), engine_(key) {}

  std::uint64_t key_;
  std::mt19937_64 engine_;
};

}  // namespace asyncsi
