#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace emz {

/// Counter-based random stream in the Philox 4x64-10 family.
///
/// Each (seed, stream) pair yields an independent, reproducible sequence no
/// matter how streams are scheduled across threads, so ensemble runs keyed by
/// (seed, replica) are bitwise reproducible under any thread count.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_{seed, stream}, ctr_{0, 0, 0, 0}, idx_(4), have_spare_(false), spare_(0.0) {}

  /// Next raw 64-bit word.
  std::uint64_t next_u64() {
    if (idx_ == 4) refill();
    return block_[idx_++];
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; consumes uniforms in pairs.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // (0,1] for the log argument
    double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925287 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  static std::uint64_t mulhi(std::uint64_t a, std::uint64_t b) {
    return static_cast<std::uint64_t>((static_cast<__uint128_t>(a) * b) >> 64);
  }

  void refill() {
    static constexpr std::uint64_t kM0 = 0xD2E7470EE14C6C93ull;
    static constexpr std::uint64_t kM1 = 0xCA5A826395121157ull;
    static constexpr std::uint64_t kW0 = 0x9E3779B97F4A7C15ull;
    static constexpr std::uint64_t kW1 = 0xBB67AE8584CAA73Bull;
    std::uint64_t x0 = ctr_[0], x1 = ctr_[1], x2 = ctr_[2], x3 = ctr_[3];
    std::uint64_t k0 = key_[0], k1 = key_[1];
    for (int round = 0; round < 10; ++round) {
      std::uint64_t hi0 = mulhi(kM0, x0), lo0 = kM0 * x0;
      std::uint64_t hi1 = mulhi(kM1, x2), lo1 = kM1 * x2;
      x0 = hi1 ^ x1 ^ k0;
      x1 = lo1;
      x2 = hi0 ^ x3 ^ k1;
      x3 = lo0;
      k0 += kW0;
      k1 += kW1;
    }
    block_ = {x0, x1, x2, x3};
    idx_ = 0;
    if (++ctr_[0] == 0 && ++ctr_[1] == 0 && ++ctr_[2] == 0) ++ctr_[3];
  }

  std::array<std::uint64_t, 2> key_;
  std::array<std::uint64_t, 4> ctr_;
  std::array<std::uint64_t, 4> block_{};
  int idx_;
  bool have_spare_;
  double spare_;
};

}  // namespace emz
