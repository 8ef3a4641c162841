#pragma once

// Counter-based random streams (Philox4x32-10).
//
// A Stream is addressed by (seed, chain, iteration, block, index). Two streams
// with different addresses are statistically independent, and the values a
// stream produces never depend on which thread created it or in what order
// streams were created. The samplers key one stream per parameter update so
// that serial and parallel sweeps draw identical numbers.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace lsirm {

enum class Block : std::uint32_t {
  Init = 1,
  Impute = 2,
  Theta = 3,
  Beta = 4,
  LogGamma = 5,
  Z = 6,
  W = 7,
  SigmaTheta = 8,
  Simulate = 9,
  Audit = 10,
  BirtX = 11,
  BirtDiscrimination = 12,
  BirtDifficulty = 13,
  Test = 100,
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo,
                    std::uint32_t& hi) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(product);
  hi = static_cast<std::uint32_t>(product >> 32);
}

}  // namespace detail

using PhiloxBlock = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

// Philox4x32 with 10 rounds (Salmon et al., SC'11).
inline PhiloxBlock philox4x32(PhiloxBlock ctr, PhiloxKey key) {
  constexpr std::uint32_t kMulA = 0xD2511F53u;
  constexpr std::uint32_t kMulB = 0xCD9E8D57u;
  constexpr std::uint32_t kWeylA = 0x9E3779B9u;
  constexpr std::uint32_t kWeylB = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    std::uint32_t lo0, hi0, lo1, hi1;
    detail::mulhilo(kMulA, ctr[0], lo0, hi0);
    detail::mulhilo(kMulB, ctr[2], lo1, hi1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeylA;
    key[1] += kWeylB;
  }
  return ctr;
}

struct StreamKey {
  std::uint64_t seed = 0;
  std::uint32_t chain = 0;
  std::uint32_t iteration = 0;
  Block block = Block::Test;
  std::uint32_t index = 0;
};

// Satisfies UniformRandomBitGenerator, so it also plugs into <random>
// algorithms such as std::shuffle.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(const StreamKey& k) {
    const std::uint64_t mixed =
        detail::splitmix64(k.seed ^ detail::splitmix64(0x5851f42d4c957f2dull +
                                                       k.chain));
    key_ = {static_cast<std::uint32_t>(mixed),
            static_cast<std::uint32_t>(mixed >> 32)};
    ctr_ = {0u, k.index, k.iteration, static_cast<std::uint32_t>(k.block)};
  }

  Stream(std::uint64_t seed, Block block, std::uint32_t index = 0)
      : Stream(StreamKey{seed, 0, 0, block, index}) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    if (used_ >= 2) refill();
    const std::uint64_t v = (static_cast<std::uint64_t>(buf_[2 * used_]) << 32) |
                            buf_[2 * used_ + 1];
    ++used_;
    return v;
  }

  // Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the second variate is cached.
  // Out of line on purpose: inlined copies may or may not be fused into
  // sincos, which rounds differently from separate sin / cos calls.
  double normal();

  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Gamma(shape, 1) by Marsaglia-Tsang, with the u^(1/shape) boost for
  // shape < 1.
  double gamma(double shape) {
    if (shape < 1.0) {
      const double u = uniform();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  // Inverse-Gamma(shape, scale): density ∝ x^(-shape-1) exp(-scale/x).
  double inverse_gamma(double shape, double scale) {
    return scale / gamma(shape);
  }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  void refill() {
    buf_ = philox4x32(ctr_, key_);
    ++ctr_[0];
    used_ = 0;
  }

  PhiloxKey key_{};
  PhiloxBlock ctr_{};
  PhiloxBlock buf_{};
  int used_ = 2;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace lsirm
