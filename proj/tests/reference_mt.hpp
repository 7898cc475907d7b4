#pragma once

// Straight transcription of the original MT19937 and MT19937-64 reference
// programs (init_genrand / genrand_int32, init_genrand64 / genrand64_int64),
// kept free of any library code so tests have an independent oracle.

#include <cstdint>

namespace reference {

class Mt32 {
 public:
  static constexpr int N = 624, M = 397;
  static constexpr std::uint32_t MATRIX_A = 0x9908b0dfU, UPPER = 0x80000000U,
                                 LOWER = 0x7fffffffU;

  explicit Mt32(std::uint32_t s) {
    mt[0] = s;
    for (mti = 1; mti < N; mti++) {
      mt[mti] = 1812433253U * (mt[mti - 1] ^ (mt[mti - 1] >> 30)) + mti;
    }
  }

  /// Next raw state word, before tempering.
  std::uint32_t untempered() {
    static const std::uint32_t mag01[2] = {0x0U, MATRIX_A};
    std::uint32_t y;
    if (mti >= N) {
      int kk;
      for (kk = 0; kk < N - M; kk++) {
        y = (mt[kk] & UPPER) | (mt[kk + 1] & LOWER);
        mt[kk] = mt[kk + M] ^ (y >> 1) ^ mag01[y & 0x1U];
      }
      for (; kk < N - 1; kk++) {
        y = (mt[kk] & UPPER) | (mt[kk + 1] & LOWER);
        mt[kk] = mt[kk + (M - N)] ^ (y >> 1) ^ mag01[y & 0x1U];
      }
      y = (mt[N - 1] & UPPER) | (mt[0] & LOWER);
      mt[N - 1] = mt[M - 1] ^ (y >> 1) ^ mag01[y & 0x1U];
      mti = 0;
    }
    return mt[mti++];
  }

  std::uint32_t genrand_int32() {
    std::uint32_t y = untempered();
    y ^= (y >> 11);
    y ^= (y << 7) & 0x9d2c5680U;
    y ^= (y << 15) & 0xefc60000U;
    y ^= (y >> 18);
    return y;
  }

 private:
  std::uint32_t mt[N];
  int mti;
};

class Mt64 {
 public:
  static constexpr int NN = 312, MM = 156;
  static constexpr std::uint64_t MATRIX_A = 0xB5026F5AA96619E9ULL,
                                 UM = 0xFFFFFFFF80000000ULL, LM = 0x7FFFFFFFULL;

  explicit Mt64(std::uint64_t seed) {
    mt[0] = seed;
    for (mti = 1; mti < NN; mti++) {
      mt[mti] = 6364136223846793005ULL * (mt[mti - 1] ^ (mt[mti - 1] >> 62)) + mti;
    }
  }

  std::uint64_t untempered() {
    static const std::uint64_t mag01[2] = {0ULL, MATRIX_A};
    std::uint64_t x;
    if (mti >= NN) {
      int i;
      for (i = 0; i < NN - MM; i++) {
        x = (mt[i] & UM) | (mt[i + 1] & LM);
        mt[i] = mt[i + MM] ^ (x >> 1) ^ mag01[(int)(x & 1ULL)];
      }
      for (; i < NN - 1; i++) {
        x = (mt[i] & UM) | (mt[i + 1] & LM);
        mt[i] = mt[i + (MM - NN)] ^ (x >> 1) ^ mag01[(int)(x & 1ULL)];
      }
      x = (mt[NN - 1] & UM) | (mt[0] & LM);
      mt[NN - 1] = mt[MM - 1] ^ (x >> 1) ^ mag01[(int)(x & 1ULL)];
      mti = 0;
    }
    return mt[mti++];
  }

  std::uint64_t genrand64_int64() {
    std::uint64_t x = untempered();
    x ^= (x >> 29) & 0x5555555555555555ULL;
    x ^= (x << 17) & 0x71D67FFFEDA60000ULL;
    x ^= (x << 37) & 0xFFF7EEE000000000ULL;
    x ^= (x >> 43);
    return x;
  }

 private:
  std::uint64_t mt[NN];
  int mti;
};

}  // namespace reference
