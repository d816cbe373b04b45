#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>

namespace grail {

// splitmix64 finalizer; used to derive substream seeds from a run seed.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Deterministic random stream: std::mt19937_64 plus fixed output transforms.
// The transforms below (not std:: distributions, which vary across standard
// library implementations) are part of the reproducibility contract:
//
//   uniform01():    (x >> 11) * 2^-53, one engine draw, result in [0, 1)
//   bernoulli(p):   uniform01() < p, exactly one draw
//   normal_pair():  Box-Muller from exactly two uniform draws
//
// Copying a RandomStream copies the engine state.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  // z0 = r*cos(theta), z1 = r*sin(theta) with r = sqrt(-2 ln(1-u1)),
  // theta = 2*pi*u2. 1-u1 is in (0, 1], so the log is finite.
  std::pair<double, double> normal_pair() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(theta), r * std::sin(theta)};
  }

  // Independent stream for a (tag, index) purpose, e.g. one per evaluation
  // pass. Derivation: seed' = mix64(seed ^ mix64(tag + index)).
  static RandomStream substream(std::uint64_t seed, std::uint64_t tag,
                                std::uint64_t index) {
    return RandomStream(mix64(seed ^ mix64(tag + index)));
  }

  bool operator==(const RandomStream&) const = default;

 private:
  std::mt19937_64 engine_;
};

}  // namespace grail
