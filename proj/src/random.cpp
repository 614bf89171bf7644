#include "lpclt/random.hpp"

#include <cmath>
#include <numbers>

#include "lpclt/numeric.hpp"

namespace lpclt {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) noexcept {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

// 53-bit uniform strictly inside (0, 1).
inline double to_open_unit(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

inline std::uint64_t join(std::uint32_t lo, std::uint32_t hi) noexcept {
  return (static_cast<std::uint64_t>(hi) << 32) | lo;
}

struct NormalPair {
  double cos_branch;
  double sin_branch;
};

inline NormalPair box_muller(const Block128& b) noexcept {
  const double u1 = to_open_unit(join(b[0], b[1]));
  const double u2 = to_open_unit(join(b[2], b[3]));
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

}  // namespace

Block128 philox4x32(Block128 ctr, std::array<std::uint32_t, 2> key) noexcept {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

std::uint64_t split_seed(std::uint64_t master, std::uint64_t replicate) noexcept {
  const Block128 out = philox4x32(
      {static_cast<std::uint32_t>(replicate),
       static_cast<std::uint32_t>(replicate >> 32), 0xffffffffu, 0xffffffffu},
      {static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32)});
  return join(out[0], out[1]);
}

Block128 CounterRng::block(std::int64_t index) const noexcept {
  const auto u = static_cast<std::uint64_t>(index);
  return philox4x32({static_cast<std::uint32_t>(u),
                     static_cast<std::uint32_t>(u >> 32), stream_, 0u},
                    key_);
}

std::uint64_t CounterRng::bits64(std::int64_t index) const noexcept {
  const Block128 b = block(index);
  return join(b[0], b[1]);
}

double CounterRng::uniform(std::int64_t index) const noexcept {
  return to_open_unit(bits64(index));
}

double CounterRng::normal(std::int64_t index) const noexcept {
  const NormalPair p = box_muller(block(floor_div(index, 2)));
  return (index & 1) ? p.sin_branch : p.cos_branch;
}

void CounterRng::fill_normals(std::int64_t first,
                              std::span<double> out) const noexcept {
  const auto n = static_cast<std::int64_t>(out.size());
  std::int64_t k = 0;
  if (n > 0 && (first & 1)) {
    out[0] = normal(first);
    k = 1;
  }
  for (; k + 1 < n; k += 2) {
    const NormalPair p = box_muller(block(floor_div(first + k, 2)));
    out[k] = p.cos_branch;
    out[k + 1] = p.sin_branch;
  }
  if (k < n) out[k] = normal(first + k);
}

bool CounterRng::bit(std::int64_t index) const noexcept {
  const std::uint64_t word = bits64(floor_div(index, 64));
  const auto pos = static_cast<unsigned>(index - 64 * floor_div(index, 64));
  return (word >> pos) & 1u;
}

}  // namespace lpclt
