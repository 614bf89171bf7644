#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "lpclt/numeric.hpp"

using namespace lpclt;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("compensated sum recovers cancelled mass") {
  std::vector<double> xs{1e16, 1.0, -1e16, 1.0};
  CHECK(compensated_sum(xs) == 2.0);
  CompensatedSum s;
  for (int i = 0; i < 10; ++i) s += 0.1;
  CHECK(s.value() == 1.0);
}

TEST_CASE("sum of squares") {
  std::vector<double> xs{3.0, 4.0, 12.0};
  CHECK(sum_of_squares(xs) == 169.0);
}

TEST_CASE("normal cdf reference values") {
  // Tabulated to 16 digits (mpmath ncdf).
  CHECK_THAT(normal_cdf(0.0), WithinAbs(0.5, 1e-16));
  CHECK_THAT(normal_cdf(1.0), WithinAbs(0.8413447460685429, 1e-15));
  CHECK_THAT(normal_cdf(-1.96), WithinAbs(0.024997895148220435, 1e-15));
  CHECK_THAT(normal_cdf(-8.0), WithinRel(6.22096057427178e-16, 1e-10));
  CHECK_THAT(normal_cdf(3.0) + normal_cdf(-3.0), WithinAbs(1.0, 1e-15));
}

TEST_CASE("gauss-legendre is exact for degree 39") {
  auto f = [](double x) { return std::pow(x, 39) + std::pow(x, 38); };
  CHECK_THAT(gauss_legendre(f, 0.0, 1.0), WithinRel(1.0 / 40.0 + 1.0 / 39.0, 1e-14));
  const auto rule = gauss_legendre_rule();
  double w = 0.0;
  for (double x : rule.weights) w += x;
  CHECK(rule.nodes.size() == 20);
  CHECK_THAT(w, WithinAbs(2.0, 1e-14));
}

TEST_CASE("composite rule on smooth and oscillating integrands") {
  CHECK_THAT(gauss_legendre([](double x) { return std::exp(x); }, 0.0, 1.0),
             WithinRel(std::numbers::e - 1.0, 1e-15));
  CHECK_THAT(gauss_legendre_composite([](double x) { return std::sin(x) * std::sin(x); }, 0.0,
                                      20.0 * std::numbers::pi, 40),
             WithinRel(10.0 * std::numbers::pi, 1e-13));
}

TEST_CASE("floor division") {
  STATIC_REQUIRE(floor_div(7, 2) == 3);
  STATIC_REQUIRE(floor_div(-7, 2) == -4);
  STATIC_REQUIRE(floor_div(-8, 2) == -4);
  STATIC_REQUIRE(floor_div(-1, 64) == -1);
}
