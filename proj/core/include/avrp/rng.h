#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace avrp {

// Seeded generator with platform-independent draws. std::*_distribution output
// differs between standard libraries, so integer and real draws are derived
// directly from the 64-bit engine.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [lo, hi], unbiased (rejection sampling).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  // Uniform real in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform_real(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

 private:
  std::mt19937_64 engine_;
};

// Named random streams derived from one master seed. Every stochastic input of
// an experiment draws from its own stream so that changing, say, the traffic
// model leaves the topology untouched.
enum class Stream : std::uint64_t {
  kTopology = 1,
  kLinkCosts = 2,
  kCatalog = 3,
  kTraffic = 4,
  kAvailability = 5,
  kSolver = 6,
};

// SplitMix64 finalizer applied to master + stream * golden-ratio increment.
std::uint64_t derive_seed(std::uint64_t master, Stream stream);

}  // namespace avrp
