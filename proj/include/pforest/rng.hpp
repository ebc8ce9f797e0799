#pragma once

#include <cstdint>
#include <cmath>

namespace pforest {

// Deterministic splittable generator (splitmix64 core). All simulation code
// draws through this class so that results are bit-identical across runs,
// platforms and thread counts: standard-library distributions are
// implementation-defined and are deliberately not used.
//
// Streams derived via stream(i) are statistically independent of each other
// and of the parent's future output; replica k of an experiment always uses
// SplitRng(seed).stream(k), which makes the schedule of worker threads
// irrelevant to the result.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : state_(mix(seed ^ kInit)) {}

  SplitRng stream(std::uint64_t stream_id) const {
    SplitRng r(0);
    r.state_ = mix(state_ + mix(stream_id * kGamma + kInit));
    return r;
  }

  std::uint64_t next() {
    state_ += kGamma;
    return mix(state_);
  }

  // Uniform in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  // 1 - unit() lies in (0, 1], so the log is finite.
  double exponential(double rate) { return -std::log(1.0 - unit()) / rate; }

  // Count of unit-exponential arrivals inside [0, mean]. Exact, O(mean);
  // our samples are at most a few hundred thousand points, where this is
  // cheaper than the point generation it gates.
  std::uint64_t poisson(double mean) {
    std::uint64_t n = 0;
    double acc = exponential(1.0);
    while (acc <= mean) {
      ++n;
      acc += exponential(1.0);
    }
    return n;
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
  static constexpr std::uint64_t kInit = 0xD1B54A32D192ED03ull;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace pforest
