#pragma once

// Non-linear control generator: a 64-bit additive counter finalized by two
// xor-shift-multiply rounds (the splitmix64 constants).  Used for contrast
// histograms and as the entropy source for planted states, so that the
// generator under test never supplies its own randomness.

#include <cstdint>

namespace mtdup {

class ControlStream {
 public:
  static constexpr std::uint64_t kIncrement = 0x9E3779B97F4A7C15ull;
  static constexpr std::uint64_t kMul1 = 0xBF58476D1CE4E5B9ull;
  static constexpr std::uint64_t kMul2 = 0x94D049BB133111EBull;

  explicit ControlStream(std::uint64_t seed) : counter_(seed) {}

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * kMul1;
    z = (z ^ (z >> 27)) * kMul2;
    return z ^ (z >> 31);
  }

  std::uint64_t next64() {
    counter_ += kIncrement;
    return mix(counter_);
  }
  /// High half of next64().
  std::uint32_t next32() { return static_cast<std::uint32_t>(next64() >> 32); }
  std::uint32_t operator()() { return next32(); }

  /// Independent substream for trial `index` under a master seed.
  static ControlStream substream(std::uint64_t seed, std::uint64_t index) {
    return ControlStream(mix(seed ^ mix(index + kIncrement)));
  }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t counter_;
};

}  // namespace mtdup
