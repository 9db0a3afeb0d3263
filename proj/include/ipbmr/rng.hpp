#pragma once

#include <cstdint>
#include <random>

namespace ipbmr {

using u128 = unsigned __int128;

// mt19937_64 is bit-exact across standard libraries; the std distributions
// are not, so every derived draw is computed here.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return engine_(); }

  // uniform in [0, bound), bound > 0
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      std::uint64_t x = engine_();
      if (x >= threshold) return x % bound;
    }
  }

  u128 below(u128 bound) {
    if (bound <= max()) return below(static_cast<std::uint64_t>(bound));
    const u128 threshold = (0 - bound) % bound;
    for (;;) {
      u128 x = (static_cast<u128>(engine_()) << 64) | engine_();
      if (x >= threshold) return x % bound;
    }
  }

  // uniform in [lo, hi]
  std::uint64_t between(std::uint64_t lo, std::uint64_t hi) {
    if (hi - lo == max()) return engine_();
    return lo + below(hi - lo + 1);
  }

  // 53-bit uniform in [0, 1)
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return unit() < p; }
  bool coin() { return (engine_() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ipbmr
