#pragma once

#include <cstdint>
#include <random>

namespace skt {

using Rng = std::mt19937_64;

// Purposes for named substreams. Values are part of the reproducibility
// contract; do not renumber.
enum class Stream : std::uint64_t {
  kPrior = 1,
  kKalmanNoise = 2,
  kMcmc = 3,
  kResample = 4,
  kEksNoise = 5,
  kDataNoise = 6,
  kTruth = 7,
  kAuxiliary = 8,
};

// Derives independent generators from a root seed and a
// (purpose, level, sweep, particle) key. Every stream is a pure function of
// the key, so results never depend on which worker handles a particle.
class RngFactory {
 public:
  explicit RngFactory(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  Rng stream(Stream purpose, std::uint64_t level = 0, std::uint64_t sweep = 0,
             std::uint64_t particle = 0) const;

 private:
  std::uint64_t seed_;
};

std::uint64_t splitmix64(std::uint64_t x);

inline double standard_normal(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return n(rng);
}

// Uniform on [0, 1).
inline double uniform01(Rng& rng) {
  return std::generate_canonical<double, 53>(rng);
}

}  // namespace skt
