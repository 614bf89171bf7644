#include <catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <vector>

#include "lpclt/random.hpp"

using namespace lpclt;

// Known-answer vectors from the Random123 distribution (kat_vectors).
TEST_CASE("philox4x32-10 known answers") {
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) ==
        Block128{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                   {0xffffffffu, 0xffffffffu}) ==
        Block128{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                   {0xa4093822u, 0x299f31d0u}) ==
        Block128{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("draws depend only on seed, stream and index") {
  const CounterRng a(42, Stream::kPrimary);
  const CounterRng b(42, Stream::kPrimary);
  const CounterRng c(42, Stream::kBits);
  CHECK(a.normal(1000) == b.normal(1000));
  CHECK(a.bits64(7) != c.bits64(7));
  std::vector<double> block(11);
  a.fill_normals(-5, block);
  for (int i = 0; i < 11; ++i) CHECK(block[i] == a.normal(-5 + i));
}

TEST_CASE("uniform stays inside the open interval") {
  const CounterRng r(1, Stream::kAuxiliary);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform(i);
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("normal moments") {
  const CounterRng r(9, Stream::kPrimary);
  const int m = 200000;
  double s1 = 0.0, s2 = 0.0, s4 = 0.0;
  for (int i = 0; i < m; ++i) {
    const double z = r.normal(i);
    s1 += z;
    s2 += z * z;
    s4 += z * z * z * z;
  }
  // Standard errors: 1/sqrt(m), sqrt(2/m), sqrt(96/m); 5 sigma bands.
  CHECK(std::fabs(s1 / m) < 5.0 / std::sqrt(m));
  CHECK(std::fabs(s2 / m - 1.0) < 5.0 * std::sqrt(2.0 / m));
  CHECK(std::fabs(s4 / m - 3.0) < 5.0 * std::sqrt(96.0 / m));
}

TEST_CASE("bits are balanced and split seeds distinct") {
  const CounterRng r(3, Stream::kBits);
  int ones = 0;
  const int m = 64 * 4096;
  for (int i = 0; i < m; ++i) ones += r.bit(i);
  CHECK(std::fabs(ones - m / 2.0) < 5.0 * std::sqrt(m / 4.0));
  CHECK(r.bit(-1) == ((r.bits64(-1) >> 63) & 1u));
  std::set<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 10000; ++i) seeds.insert(split_seed(1, i));
  CHECK(seeds.size() == 10000);
  CHECK(split_seed(1, 5) != split_seed(2, 5));
}
