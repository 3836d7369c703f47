#pragma once

#include <cstdint>
#include <random>

namespace gfnoma {

// Single deterministic randomness source for a run. All sampling goes through
// the explicit transforms below; std::* distribution objects are never used,
// so two builds of the same seed produce identical draw sequences.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  // Uniform on (0, 1]: (x + 1) * 2^-53 with x the top 53 bits.
  // Never returns 0, so -log(u) and division stay finite.
  double uniform_open_closed() {
    return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Uniform on [0, 1).
  double uniform_half_open() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n). Multiply-shift on the top 32 bits; the
  // residual bias of n / 2^32 is irrelevant at the n used here.
  std::uint32_t below(std::uint32_t n) {
    const std::uint64_t x = eng_() >> 32;
    return static_cast<std::uint32_t>((x * n) >> 32);
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace gfnoma
