#pragma once

#include <cmath>
#include <cstdint>

namespace mpl {

/// Counter-style generator built on the splitmix64 finalizer. Each
/// replication owns a substream keyed by (seed, stream index), so results do
/// not depend on execution order and split runs pool exactly.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : state_(key) {}

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  static CounterRng substream(std::uint64_t seed, std::uint64_t stream) {
    const std::uint64_t key =
        mix(seed + 0x9E3779B97F4A7C15ULL) ^ mix(stream * 0xD1342543DE82EF95ULL + 1);
    return CounterRng(mix(key));
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  /// Uniform in [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Box-Muller; one normal per call keeps the stream position predictable.
  double normal(double mean, double sd) {
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + sd * r * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::uint64_t state_;
};

}  // namespace mpl
