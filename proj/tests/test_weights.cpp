#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "lpclt/numeric.hpp"
#include "lpclt/weights.hpp"

using namespace lpclt;
using namespace lpclt::weights;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// b_{n,j} = a_{j+1} + ... + a_{j+n}, summed term by term.
double direct_b(const WeightSequence& a, std::int64_t n, std::int64_t j) {
  double s = 0.0;
  for (std::int64_t i = 1; i <= n; ++i) s += a(j + i);
  return s;
}

}  // namespace

TEST_CASE("weight sequences are zero off their support") {
  const auto p = WeightSequence::power_decay(0.7);
  CHECK(p(-1) == 0.0);
  CHECK(p(0) == 1.0);
  CHECK_THAT(p(3), WithinRel(std::pow(4.0, -0.7), 1e-15));
  const auto f = WeightSequence::finite_support(-2, {1.0, 2.0});
  CHECK(f(-3) == 0.0);
  CHECK(f(-1) == 2.0);
  CHECK(f(0) == 0.0);
  CHECK_THROWS_AS(WeightSequence::power_decay(0.5), PreconditionError);
  CHECK_THROWS_AS(WeightSequence::geometric(1.0), PreconditionError);
}

TEST_CASE("partial-sum-delta window") {
  const auto w = window_coefficients(WeightSequence::partial_sum_delta(), 3, 1e-6);
  for (std::int64_t j = -6; j <= 3; ++j) CHECK(w.at(j) == ((j >= -3 && j <= -1) ? 1.0 : 0.0));
  CHECK(w.bn_sq == 3.0);
  CHECK(w.tail_bound == 0.0);
}

TEST_CASE("finite-support window against direct summation") {
  const auto a = WeightSequence::finite_support(0, {1.0, 1.0});
  const auto w = window_coefficients(a, 2, 1e-6);
  CHECK(w.at(-2) == 1.0);
  CHECK(w.at(-1) == 2.0);
  CHECK(w.at(0) == 1.0);
  CHECK(w.bn_sq == 6.0);
  for (std::int64_t j = -5; j <= 3; ++j) CHECK(w.at(j) == direct_b(a, 2, j));
}

TEST_CASE("infinite windows match direct sums on the stored support") {
  for (const auto& a : {WeightSequence::power_decay(0.7), WeightSequence::geometric(0.8)}) {
    const auto w = window_coefficients(a, 37, 0.02);
    CHECK(w.tail_bound <= 0.02);
    for (std::int64_t j = w.j_lo; j <= w.j_hi; j += 7) {
      CHECK_THAT(w.at(j), WithinRel(direct_b(a, 37, j), 1e-12));
    }
    CHECK_THAT(w.bn_sq, WithinRel(w.stored_sq + w.tail_sq, 1e-15));
  }
}

TEST_CASE("geometric normalizer grows like (sum a)^2 n") {
  const auto w = window_coefficients(WeightSequence::geometric(0.5), 4096, 1e-8);
  CHECK_THAT(w.bn_sq / 4096.0, WithinRel(4.0, 0.05));
}

TEST_CASE("truncation failure names the kind") {
  CHECK_THROWS_WITH(window_coefficients(WeightSequence::power_decay(0.51), 1024, 1e-9),
                    Catch::Matchers::ContainsSubstring("truncation not certified") &&
                        Catch::Matchers::ContainsSubstring("power-decay"));
}

TEST_CASE("smoothness ratios for the partial-sum window") {
  for (std::int64_t n : {1, 4, 10, 100}) {
    const auto w = window_coefficients(WeightSequence::partial_sum_delta(), n, 1e-6);
    const auto r = smoothness_ratios(w);
    CHECK_THAT(r.r1, WithinRel(2.0 / static_cast<double>(n), 1e-15));
    CHECK_THAT(r.r2, WithinRel(2.0 / static_cast<double>(n), 1e-15));
  }
}

TEST_CASE("first difference ratio by hand") {
  // d = (1, 2, 1): differences 1, 1, -1, -1 -> 4 / 6.
  const std::vector<double> d{1.0, 2.0, 1.0};
  CHECK_THAT(first_difference_ratio(d), WithinRel(4.0 / 6.0, 1e-15));
}

TEST_CASE("block averages") {
  const auto w = window_coefficients(WeightSequence::partial_sum_delta(), 4, 1e-6);
  const auto b = block_averages(w, 2);
  CHECK(block_of(-1, 2) == 0);
  CHECK(block_of(0, 2) == 0);
  CHECK(block_of(1, 2) == 1);
  CHECK(b.at(0) == 0.5);
  CHECK(b.at(-1) == 1.0);
  const auto single = block_averages(w, 1);
  CHECK(single.s1 == 0.0);
  CHECK(single.s2 == 0.0);
  for (std::int64_t j = -4; j <= -1; ++j) CHECK(single.at(j) == w.at(j));
}

TEST_CASE("power-decay ratios shrink with n") {
  const auto a = WeightSequence::power_decay(0.7);
  const auto lo = window_coefficients(a, 64, 0.02);
  const auto hi = window_coefficients(a, 1 << 14, 0.02);
  CHECK(smoothness_ratios(hi).r1 < smoothness_ratios(lo).r1);
  CHECK(smoothness_ratios(hi).r1 < 0.01);
  CHECK(block_averages(hi, 8).s1 < block_averages(lo, 8).s1);
  CHECK(block_averages(hi, 8).s1 < 0.02);
}

TEST_CASE("weighted tail inequality examples") {
  std::vector<double> a(60), psi(60, 1.0);
  for (int i = 0; i < 60; ++i) a[i] = std::ldexp(1.0, -(i + 1));
  const auto r = wu_inequality(a, psi);
  CHECK_THAT(r.lhs, WithinAbs(1.0, 1e-15));
  // 3 sum_n n^{-1/2} (4^{-n+1}/3)^{1/2}, summed independently.
  double rhs = 0.0;
  for (int n = 1; n <= 60; ++n) rhs += std::pow(n, -0.5) * std::sqrt(std::pow(4.0, -(n - 1)) / 3.0);
  CHECK_THAT(r.rhs, WithinRel(3.0 * rhs, 1e-12));
  CHECK_THAT(r.rhs, WithinAbs(2.79, 0.01));
  CHECK(r.holds);

  const std::vector<double> zero(10, 0.0), ones(10, 1.0);
  const auto z = wu_inequality(ones, zero);
  CHECK(z.lhs == 0.0);
  CHECK(z.rhs == 0.0);
  CHECK(z.holds);

  const std::vector<double> two{1.0, 1.0}, up{0.1, 0.2};
  CHECK_THROWS_AS(wu_inequality(two, up), PreconditionError);
}

TEST_CASE("weighted tail inequality property suite") {
  const auto s = wu_property_suite(100, 2024);
  CHECK(s.instances == 100);
  CHECK(s.failures == 0);
  CHECK(s.max_ratio > 0.0);
  CHECK(s.max_ratio <= 1.0);
}
