#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace hslg {

// Philox4x32-10 (Salmon et al., SC'11). Counter-based: the output block is a
// pure function of (key, counter), so streams can be addressed directly
// instead of being split or jumped.
class Philox4x32 {
 public:
  using result_type = std::uint64_t;

  Philox4x32() : Philox4x32(0, 0) {}
  Philox4x32(std::uint64_t key, std::uint64_t substream) { reset(key, substream); }

  void reset(std::uint64_t key, std::uint64_t substream) {
    key_ = {static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)};
    ctr_ = {0, 0, static_cast<std::uint32_t>(substream),
            static_cast<std::uint32_t>(substream >> 32)};
    idx_ = 2;
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (idx_ == 2) {
      block_ = bijection(ctr_, key_);
      if (++ctr_[0] == 0) ++ctr_[1];
      idx_ = 0;
    }
    const std::uint64_t lo = block_[2 * idx_];
    const std::uint64_t hi = block_[2 * idx_ + 1];
    ++idx_;
    return lo | (hi << 32);
  }

  void discard(std::uint64_t n) {
    for (; n > 0; --n) (*this)();
  }

  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Block bijection(Block ctr, Key key) {
    for (int r = 0; r < 10; ++r) {
      if (r > 0) {
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
      }
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }

 private:
  Key key_{};
  Block ctr_{};
  Block block_{};
  int idx_ = 2;
};

using Rng = Philox4x32;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Key for (global seed, experiment id, replica id).
constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t experiment,
                                   std::uint64_t replica) {
  return splitmix64(splitmix64(splitmix64(seed) ^ experiment) ^ replica);
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t experiment, std::uint64_t replica,
                    std::uint64_t substream = 0) {
  return Rng(stream_key(seed, experiment, replica), substream);
}

// Uniform on the open interval (0,1), 53 random bits.
inline double uniform01(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace hslg
