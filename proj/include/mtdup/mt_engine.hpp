#pragma once

// Parameterized Mersenne Twister (MT19937 and MT19937-64).
//
// The engine exposes the untempered word sequence x_0, x_1, ... directly.
// After seed_init the state array holds x_0 .. x_{n-1}; the first word
// returned by next_untempered is x_n, which is also the reference
// implementation's first output (after tempering).

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mtdup {

struct GeneratorParams {
  std::string name;
  unsigned w = 0;  ///< word size in bits
  unsigned n = 0;  ///< state length in words
  unsigned m = 0;  ///< middle offset
  unsigned r = 0;  ///< split position: low r bits come from x_{k+1}
  std::uint64_t a = 0;  ///< twist feedback word
  // Tempering: y ^= (y >> u) & d; y ^= (y << s) & b; y ^= (y << t) & c;
  // y ^= y >> l.
  unsigned u = 0;
  std::uint64_t d = 0;
  unsigned s = 0;
  std::uint64_t b = 0;
  unsigned t = 0;
  std::uint64_t c = 0;
  unsigned l = 0;
  std::uint64_t init_multiplier = 0;

  static GeneratorParams mt19937();
  static GeneratorParams mt19937_64();
  /// Small-word variant with w - r = 1 and identity-ish tempering; only the
  /// algebra is meaningful (no equidistribution claims).
  static GeneratorParams toy(unsigned w, std::uint64_t a, unsigned n = 7,
                             unsigned m = 3);

  std::uint64_t word_mask() const {
    return w == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << w) - 1;
  }
  std::uint64_t lower_mask() const {
    return r == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << r) - 1;
  }
  std::uint64_t upper_mask() const { return word_mask() & ~lower_mask(); }

  /// Throws std::invalid_argument if the descriptor is inconsistent.
  void validate() const;
};

struct GeneratorState {
  std::vector<std::uint64_t> words;  ///< words[j] = x_{origin + j}
  std::size_t cursor = 0;            ///< index of the next word to return
  std::uint64_t origin = 0;

  friend bool operator==(const GeneratorState&, const GeneratorState&) = default;
};

/// The masked twist: x_{k+n} = x_{k+m} ^ twist(x_k, x_{k+1}).
inline std::uint64_t twist(const GeneratorParams& p, std::uint64_t xk,
                           std::uint64_t xk1) {
  const std::uint64_t y = (xk & p.upper_mask()) | (xk1 & p.lower_mask());
  return (y >> 1) ^ ((y & 1u) ? p.a : 0);
}

std::uint64_t temper(const GeneratorParams& p, std::uint64_t x);
std::uint64_t untemper(const GeneratorParams& p, std::uint64_t y);

class MersenneTwister {
 public:
  explicit MersenneTwister(GeneratorParams params);
  MersenneTwister(GeneratorParams params, GeneratorState state);

  /// Standard multiplier-recurrence initializer.
  static MersenneTwister seeded(const GeneratorParams& params,
                                std::uint64_t seed);

  /// Returns x_{origin + cursor} and advances.
  std::uint64_t next_untempered() {
    if (state_.cursor >= params_.n) regenerate();
    return state_.words[state_.cursor++];
  }
  std::uint64_t next_tempered() { return temper(params_, next_untempered()); }

  /// Absolute x-index of the word the next call will return.
  std::uint64_t position() const { return state_.origin + state_.cursor; }
  void discard(std::uint64_t count);
  /// x_index for index >= state().origin; leaves the cursor just past it.
  std::uint64_t word_at(std::uint64_t index);

  /// Overwrites state words [position, position + values.size()).  Requires
  /// 1 <= position and position + size <= n; throws std::out_of_range
  /// otherwise.
  void plant_window(std::size_t position, std::span<const std::uint64_t> values);

  const GeneratorParams& params() const { return params_; }
  const GeneratorState& state() const { return state_; }

 private:
  void regenerate();

  GeneratorParams params_;
  GeneratorState state_;
};

GeneratorState seed_init(const GeneratorParams& params, std::uint64_t seed);

/// Functional form of MersenneTwister::plant_window.
GeneratorState plant_window(const GeneratorParams& params, GeneratorState state,
                            std::size_t position,
                            std::span<const std::uint64_t> values);

}  // namespace mtdup
