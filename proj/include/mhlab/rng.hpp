#pragma once

#include <cstdint>
#include <random>

namespace mhlab {

// Deterministic uniform generator. The raw-bit mapping (x >> 11) * 2^-53 is
// used instead of std::uniform_real_distribution because the distribution's
// output is not specified bit-for-bit across standard libraries, and reports
// promise bitwise reproducibility for a fixed seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mhlab
