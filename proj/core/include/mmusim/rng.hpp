#pragma once

#include <cstdint>

namespace mmusim {

// splitmix64: small deterministic generator used everywhere a seeded stream
// is needed. Standard-library distributions are implementation-defined, so
// all sampling goes through this to keep runs bit-reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 1) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n); n must be nonzero.
  std::uint64_t next_below(std::uint64_t n) { return next() % n; }

  // Uniform in [0, 1) with 53 bits of precision.
  double next_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  bool next_bool(double p_true) { return next_double() < p_true; }

 private:
  std::uint64_t state_;
};

}  // namespace mmusim
