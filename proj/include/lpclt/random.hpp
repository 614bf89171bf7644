#pragma once

// Counter-based random numbers. Every draw is a pure function of
// (seed, stream, index), so a sample path can be generated for any index
// window in any order and reproduced bit-for-bit.
//
// Generator: Philox4x32-10 (Salmon et al., SC'11). The 64-bit seed is the
// key; the 128-bit counter is (index_lo, index_hi, stream, 0).
// Standard normals come in Box-Muller pairs: the normal at index k is the
// cosine (k even) or sine (k odd) branch built from block k >> 1.
// Replicate seeds are split as split_seed(master, r) = first 64 bits of
// Philox(counter = (r_lo, r_hi, 0xffffffff, 0xffffffff), key = master).

#include <array>
#include <cstdint>
#include <span>

namespace lpclt {

using Block128 = std::array<std::uint32_t, 4>;

/// One Philox4x32-10 block.
[[nodiscard]] Block128 philox4x32(Block128 counter,
                                  std::array<std::uint32_t, 2> key) noexcept;

/// Seed for replicate `replicate` of a run keyed by `master`.
[[nodiscard]] std::uint64_t split_seed(std::uint64_t master,
                                       std::uint64_t replicate) noexcept;

/// Named streams keep the draws of one model component independent of the
/// others under the same seed.
enum class Stream : std::uint32_t {
  kPrimary = 0,   // Gaussian driver (Y, Z, N)
  kBits = 1,      // Bernoulli-shift digits
  kScale = 2,     // per-path mixture component
  kAuxiliary = 3, // test and probe draws
};

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, Stream stream) noexcept
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        stream_(static_cast<std::uint32_t>(stream)) {}

  [[nodiscard]] Block128 block(std::int64_t index) const noexcept;

  /// 64 random bits attached to `index`.
  [[nodiscard]] std::uint64_t bits64(std::int64_t index) const noexcept;

  /// Uniform on the open interval (0, 1).
  [[nodiscard]] double uniform(std::int64_t index) const noexcept;

  /// Standard normal attached to `index`.
  [[nodiscard]] double normal(std::int64_t index) const noexcept;

  /// out[i] = normal(first + i).
  void fill_normals(std::int64_t first, std::span<double> out) const noexcept;

  /// Single fair bit attached to `index` (64 bits per Philox half-block).
  [[nodiscard]] bool bit(std::int64_t index) const noexcept;

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint32_t stream_;
};

}  // namespace lpclt
