#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC 2011).
//
// Keying used by the Monte Carlo engine: key = (seed lo32, seed hi32),
// counter = (block, trial-within-batch, batch lo32, batch hi32). Every trial
// therefore owns an independent stream addressed only by (seed, batch, trial).

#include <array>
#include <cstdint>

namespace bipcorr {

class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr std::uint32_t kM0 = 0xD2511F53;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57;
  static constexpr std::uint32_t kW0 = 0x9E3779B9;
  static constexpr std::uint32_t kW1 = 0xBB67AE85;
  static constexpr int kRounds = 10;

  static constexpr Counter generate(Counter ctr, Key key) {
    for (int r = 0; r < kRounds; ++r) {
      if (r > 0) {
        key[0] += kW0;
        key[1] += kW1;
      }
      ctr = round(ctr, key);
    }
    return ctr;
  }

 private:
  static constexpr Counter round(const Counter& c, const Key& k) {
    const std::uint64_t p0 = std::uint64_t{kM0} * c[0];
    const std::uint64_t p1 = std::uint64_t{kM1} * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
};

/// Sequential 64-bit words of one trial's stream.
class TrialStream {
 public:
  TrialStream(std::uint64_t seed, std::uint64_t batch, std::uint32_t trial)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        ctr_{0, trial, static_cast<std::uint32_t>(batch), static_cast<std::uint32_t>(batch >> 32)} {}

  std::uint64_t next() {
    if (used_ == 2) {
      block_ = Philox4x32::generate(ctr_, key_);
      ++ctr_[0];
      used_ = 0;
    }
    const std::size_t i = 2 * used_++;
    return (std::uint64_t{block_[i + 1]} << 32) | block_[i];
  }

 private:
  Philox4x32::Key key_;
  Philox4x32::Counter ctr_;
  Philox4x32::Counter block_{};
  int used_ = 2;
};

}  // namespace bipcorr
