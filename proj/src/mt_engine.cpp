#include "mtdup/mt_engine.hpp"

#include <stdexcept>
#include <utility>

namespace mtdup {

GeneratorParams GeneratorParams::mt19937() {
  GeneratorParams p;
  p.name = "mt19937";
  p.w = 32;
  p.n = 624;
  p.m = 397;
  p.r = 31;
  p.a = 0x9908B0DFu;
  p.u = 11;
  p.d = 0xFFFFFFFFu;
  p.s = 7;
  p.b = 0x9D2C5680u;
  p.t = 15;
  p.c = 0xEFC60000u;
  p.l = 18;
  p.init_multiplier = 1812433253u;
  return p;
}

GeneratorParams GeneratorParams::mt19937_64() {
  GeneratorParams p;
  p.name = "mt19937_64";
  p.w = 64;
  p.n = 312;
  p.m = 156;
  p.r = 31;
  p.a = 0xB5026F5AA96619E9ull;
  p.u = 29;
  p.d = 0x5555555555555555ull;
  p.s = 17;
  p.b = 0x71D67FFFEDA60000ull;
  p.t = 37;
  p.c = 0xFFF7EEE000000000ull;
  p.l = 43;
  p.init_multiplier = 6364136223846793005ull;
  return p;
}

GeneratorParams GeneratorParams::toy(unsigned w, std::uint64_t a, unsigned n,
                                     unsigned m) {
  GeneratorParams p;
  p.name = "toy" + std::to_string(w);
  p.w = w;
  p.n = n;
  p.m = m;
  p.r = w - 1;
  p.a = a;
  p.u = 1;
  p.d = 0;  // no tempering
  p.s = 1;
  p.b = 0;
  p.t = 1;
  p.c = 0;
  p.l = w;
  p.init_multiplier = 69069;
  return p;
}

void GeneratorParams::validate() const {
  if (w < 3 || w > 64) throw std::invalid_argument("w must be in 3..64");
  if (n < 2 || m < 1 || m >= n) throw std::invalid_argument("need 1 <= m < n");
  if (r < 1 || r >= w) throw std::invalid_argument("need 1 <= r < w");
  if ((a & ~word_mask()) != 0) throw std::invalid_argument("a wider than w");
  if (((a >> (w - 1)) & 1u) == 0) {
    throw std::invalid_argument("top bit of a must be 1");
  }
}

std::uint64_t temper(const GeneratorParams& p, std::uint64_t x) {
  const std::uint64_t mask = p.word_mask();
  std::uint64_t y = x & mask;
  y ^= (y >> p.u) & p.d;
  y ^= (y << p.s) & p.b & mask;
  y ^= (y << p.t) & p.c & mask;
  if (p.l < p.w) y ^= y >> p.l;
  return y;
}

namespace {

// Inverse of y = x ^ ((x >> shift) & mask) by fixed-point iteration; each
// pass fixes `shift` more bits from the top.
std::uint64_t undo_right(std::uint64_t y, unsigned shift, std::uint64_t mask,
                         unsigned w) {
  if (shift >= w || mask == 0) return y;
  std::uint64_t x = y;
  for (unsigned done = 0; done < w; done += shift) x = y ^ ((x >> shift) & mask);
  return x;
}

std::uint64_t undo_left(std::uint64_t y, unsigned shift, std::uint64_t mask,
                        std::uint64_t word_mask, unsigned w) {
  if (shift >= w || mask == 0) return y;
  std::uint64_t x = y;
  for (unsigned done = 0; done < w; done += shift) {
    x = y ^ ((x << shift) & mask & word_mask);
  }
  return x;
}

}  // namespace

std::uint64_t untemper(const GeneratorParams& p, std::uint64_t y) {
  const std::uint64_t mask = p.word_mask();
  std::uint64_t x = y & mask;
  x = undo_right(x, p.l, mask, p.w);
  x = undo_left(x, p.t, p.c, mask, p.w);
  x = undo_left(x, p.s, p.b, mask, p.w);
  x = undo_right(x, p.u, p.d, p.w);
  return x;
}

GeneratorState seed_init(const GeneratorParams& params, std::uint64_t seed) {
  const std::uint64_t mask = params.word_mask();
  GeneratorState st;
  st.words.resize(params.n);
  st.words[0] = seed & mask;
  for (unsigned i = 1; i < params.n; ++i) {
    const std::uint64_t prev = st.words[i - 1];
    st.words[i] =
        (params.init_multiplier * (prev ^ (prev >> (params.w - 2))) + i) & mask;
  }
  st.cursor = params.n;
  st.origin = 0;
  return st;
}

MersenneTwister::MersenneTwister(GeneratorParams params)
    : params_(std::move(params)) {
  params_.validate();
  state_.words.assign(params_.n, 0);
  state_.cursor = params_.n;
}

MersenneTwister::MersenneTwister(GeneratorParams params, GeneratorState state)
    : params_(std::move(params)), state_(std::move(state)) {
  params_.validate();
  if (state_.words.size() != params_.n || state_.cursor > params_.n) {
    throw std::invalid_argument("GeneratorState does not match params");
  }
}

MersenneTwister MersenneTwister::seeded(const GeneratorParams& params,
                                        std::uint64_t seed) {
  return MersenneTwister(params, seed_init(params, seed));
}

void MersenneTwister::regenerate() {
  const unsigned n = params_.n;
  const unsigned m = params_.m;
  const std::uint64_t upper = params_.upper_mask();
  const std::uint64_t lower = params_.lower_mask();
  const std::uint64_t a = params_.a;
  std::uint64_t* x = state_.words.data();
  auto step = [&](unsigned k, unsigned k1, unsigned km) {
    const std::uint64_t y = (x[k] & upper) | (x[k1] & lower);
    x[k] = x[km] ^ (y >> 1) ^ ((y & 1u) ? a : 0);
  };
  unsigned k = 0;
  for (; k < n - m; ++k) step(k, k + 1, k + m);
  for (; k < n - 1; ++k) step(k, k + 1, k + m - n);
  step(n - 1, 0, m - 1);
  state_.origin += n;
  state_.cursor = 0;
}

void MersenneTwister::discard(std::uint64_t count) {
  while (count > 0) {
    if (state_.cursor >= params_.n) regenerate();
    const std::uint64_t avail = params_.n - state_.cursor;
    const std::uint64_t take = count < avail ? count : avail;
    state_.cursor += take;
    count -= take;
  }
}

std::uint64_t MersenneTwister::word_at(std::uint64_t index) {
  if (index < state_.origin) {
    throw std::out_of_range("word_at: index precedes the current block");
  }
  while (index >= state_.origin + params_.n) regenerate();
  state_.cursor = static_cast<std::size_t>(index - state_.origin) + 1;
  return state_.words[state_.cursor - 1];
}

void MersenneTwister::plant_window(std::size_t position,
                                   std::span<const std::uint64_t> values) {
  state_ = mtdup::plant_window(params_, std::move(state_), position, values);
}

GeneratorState plant_window(const GeneratorParams& params, GeneratorState state,
                            std::size_t position,
                            std::span<const std::uint64_t> values) {
  if (position < 1 || position + values.size() > params.n) {
    throw std::out_of_range("plant_window: window must lie in words 1..n-1");
  }
  const std::uint64_t mask = params.word_mask();
  for (std::size_t j = 0; j < values.size(); ++j) {
    state.words[position + j] = values[j] & mask;
  }
  return state;
}

}  // namespace mtdup
