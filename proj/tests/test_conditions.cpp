#include <catch_amalgamated.hpp>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>
#include <numbers>

#include "lpclt/conditions.hpp"
#include "lpclt/numeric.hpp"

using namespace lpclt;
using namespace lpclt::conditions;
using innovations::CausalCoefficients;
using innovations::InnovationModel;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const InnovationModel kIid = InnovationModel::iid();
const InnovationModel kGeo = InnovationModel::causal_linear(CausalCoefficients::geometric(0.5));

InnovationModel counterexample() {
  return InnovationModel::causal_linear(CausalCoefficients::proposition3(
      innovations::proposition3_weights(innovations::NullSequence::inverse_log(), 1'000'000)));
}

// zeta(s) by the p-series with an Euler-Maclaurin tail after N terms.
double zeta(double s, int N = 100000) {
  double sum = 0.0;
  for (int k = N - 1; k >= 1; --k) sum += std::pow(k, -s);
  const double n = N;
  return sum + std::pow(n, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(n, -s) +
         s * std::pow(n, -s - 1.0) / 12.0;
}

}  // namespace

TEST_CASE("Gamma_j for iid and martingale differences") {
  CHECK(gamma_j(kIid, 0, 100) == 1.0);
  CHECK(gamma_j(kIid, 1, 100) == 0.0);
  CHECK(gamma_j(InnovationModel::mds_product(), 3, 100) == 0.0);
  CHECK_THROWS_WITH(gamma_j(InnovationModel::bernoulli_shift(maps::CatalogMap::square()), 0, 10),
                    ContainsSubstring("inconclusive: no analytic conditional structure"));
}

TEST_CASE("Gamma_j for the geometric filter") {
  CHECK_THAT(gamma_j(kGeo, 0, 4096), WithinRel(8.0 / 3.0, 1e-12));
  CHECK_THAT(gamma_j(kGeo, 1, 4096), WithinRel(2.0 / 3.0, 1e-12));
  const auto u = CausalCoefficients::geometric(0.5);
  double prev = kInf;
  for (int j = 0; j <= 20; ++j) {
    // Truncated triple sum sum_k sum_{i>=j} u_{k+i} u_i.
    double s = 0.0;
    for (int k = 0; k < 120; ++k) {
      for (int i = j; i < j + 120; ++i) s += std::pow(0.5, k + i) * std::pow(0.5, i);
    }
    const double closed = std::pow(0.5, 2 * j) / (0.5 * 0.75);
    const double a = gamma_j(kGeo, j, 4096);
    CHECK_THAT(a, WithinRel(closed, 1e-10));
    CHECK_THAT(gamma_j_double_sum(u, j, 4096), WithinRel(closed, 1e-10));
    CHECK_THAT(s, WithinRel(closed, 1e-10));
    CHECK(a <= prev);
    prev = a;
  }
}

TEST_CASE("two routes agree on a finite table") {
  const auto u = CausalCoefficients::table({1.0, 0.8, 0.1, 0.0, 0.3});
  const auto m = InnovationModel::causal_linear(u);
  for (int j = 0; j < 7; ++j) {
    const double a = gamma_j(m, j, 64);
    const double b = gamma_j_double_sum(u, j, 64);
    if (a == 0.0) {
      CHECK(b == 0.0);
    } else {
      CHECK_THAT(a, WithinRel(b, 1e-12));
    }
  }
}

TEST_CASE("Cesaro means") {
  CHECK(cesaro_gamma(kIid, 16) == 0.0);
  const auto r = cesaro_report(kGeo, 10);
  CHECK(r.verdict == Verdict::kSatisfied);
  for (std::size_t i = 1; i < r.partial_sums.size(); ++i) {
    CHECK(r.partial_sums[i].second < r.partial_sums[i - 1].second);
  }
  CHECK(r.partial_sums.back().first == 1024);
  CHECK(r.partial_sums.back().second < 1e-2);
  CHECK_THAT(cesaro_gamma(kGeo, 4), WithinRel((8.0 / 3.0) * (0.25 + 0.0625 + 0.015625 + 0.00390625) / 4.0, 1e-12));
}

TEST_CASE("projective sums") {
  const auto iid = projective_sum(kIid);
  CHECK(iid.verdict == Verdict::kSatisfied);
  CHECK(iid.value == 0.0);
  const auto geo = projective_sum(kGeo);
  CHECK(geo.verdict == Verdict::kSatisfied);
  CHECK_THAT(*geo.value, WithinRel(1.0, 1e-14));
  const auto ce = projective_sum(counterexample());
  CHECK(ce.verdict == Verdict::kViolated);
  CHECK_FALSE(ce.value);
  for (std::size_t i = 1; i < ce.partial_sums.size(); ++i) {
    CHECK(ce.partial_sums[i].second - ce.partial_sums[i - 1].second > 0.5 - 1e-12);
  }
  CHECK(projective_sum(InnovationModel::bernoulli_shift(maps::CatalogMap::linear())).verdict ==
        Verdict::kInconclusive);
}

TEST_CASE("Maxwell-Woodroofe sums") {
  const auto iid = maxwell_woodroofe_sum(kIid, 100);
  CHECK(iid.verdict == Verdict::kSatisfied);
  CHECK(iid.value == 0.0);
  double direct = 0.0;
  for (int n = 1; n < 200; ++n) direct += std::pow(n, -0.5) * std::pow(0.5, n) / std::sqrt(0.75);
  const auto geo = maxwell_woodroofe_sum(kGeo, 4096);
  CHECK(geo.verdict == Verdict::kSatisfied);
  CHECK_THAT(*geo.value, WithinRel(direct, 1e-12));
  CHECK_THAT(*geo.value, WithinAbs(0.93, 0.01));

  const auto model = counterexample();
  const auto plain = maxwell_woodroofe_sum(model, 1 << 20);
  CHECK(plain.verdict == Verdict::kViolated);
  for (std::size_t i = 1; i < plain.partial_sums.size(); ++i) {
    CHECK(plain.partial_sums[i].second - plain.partial_sums[i - 1].second >=
          1.0 / (3.0 * std::sqrt(2.0)));
  }
  const auto weighted =
      maxwell_woodroofe_weighted(model, innovations::NullSequence::inverse_log(), 1 << 20);
  CHECK(weighted.condition_id == "maxwell-woodroofe-weighted");
  CHECK(weighted.verdict == Verdict::kSatisfied);
  REQUIRE(weighted.value);
  CHECK(std::isfinite(weighted.tail_bound));
}

TEST_CASE("functional condition for Bernoulli shifts") {
  double direct = 0.0;
  for (int n = 1; n <= 60; ++n) direct += std::pow(n, -0.5) * std::ldexp(1.0, -n);
  direct /= std::sqrt(12.0);
  const auto lin = functional_iid_sum(maps::CatalogMap::linear(), 40);
  CHECK(lin.verdict == Verdict::kSatisfied);
  CHECK_THAT(*lin.value, WithinAbs(direct, 1e-6));
  CHECK_THAT(*lin.value, WithinAbs(0.2327, 1e-4));

  // The first digit fixes the indicator, so every projection remainder is 0.
  const auto ind = functional_iid_sum(maps::CatalogMap::half_indicator(), 40);
  CHECK(ind.verdict == Verdict::kSatisfied);
  CHECK(*ind.value == 0.0);

  const auto sq = functional_iid_sum(maps::CatalogMap::square(), 40);
  CHECK(sq.verdict == Verdict::kSatisfied);
  const auto& ps = sq.partial_sums;
  CHECK(ps.back().second - ps[ps.size() - 2].second < 1e-6);

  CHECK(functional_iid_sum(maps::CatalogMap::oscillating(0.4, 1.0), 10).verdict ==
        Verdict::kInconclusive);
}

TEST_CASE("diagonal increments") {
  // g(x + d) - g(x) loses about log10(1/d) digits.
  for (double d : {0.5, 0.1, 1e-3, 1e-6}) {
    CHECK_THAT(diagonal_increment(maps::CatalogMap::linear(), d), WithinRel(d * d * (1.0 - d), 1e-9));
    CHECK_THAT(diagonal_increment(maps::CatalogMap::half_indicator(), d), WithinRel(d, 1e-9));
  }
  // x^2: int_0^{1-d} (2xd + d^2)^2 dx
  const double d = 0.25;
  const double L = 1.0 - d;
  const double exact = 4 * d * d * L * L * L / 3 + 2 * d * d * d * L * L + d * d * d * d * L;
  CHECK_THAT(diagonal_increment(maps::CatalogMap::square(), d), WithinRel(exact, 1e-12));
}

TEST_CASE("double integral near the diagonal") {
  const auto lin = bernoulli_integral_11(maps::CatalogMap::linear(), 2.0, 24);
  CHECK(lin.verdict == Verdict::kSatisfied);
  const auto osc = bernoulli_integral_11(maps::CatalogMap::oscillating(0.4, 1.0), 2.0, 24);
  CHECK(osc.verdict == Verdict::kSatisfied);
  CHECK(std::isfinite(*osc.value));

  // For the jump map, D(d) = min(d, 1 - d), so the integral is
  // 2 [int_0^{1/2} L(d) dd + log 2 - 1/2] with L the clamped loglog factor;
  // int_0^{exp(-e)} (log log 1/d)^2 dd = int_e^inf (log s)^2 e^{-s} ds.
  boost::math::quadrature::exp_sinh<double> es;
  const double e = std::numbers::e;
  const double near = es.integrate([](double s) { return std::pow(std::log(s), 2) * std::exp(-s); }, e,
                                   std::numeric_limits<double>::infinity());
  const double exact = 2.0 * (near + (0.5 - std::exp(-e)) + std::numbers::ln2 - 0.5);
  const auto jump = bernoulli_integral_11(maps::CatalogMap::half_indicator(), 2.0, 24);
  CHECK(jump.verdict == Verdict::kSatisfied);
  CHECK_THAT(*jump.value, WithinRel(exact, 1e-5));
  CHECK_THAT(jump.notes, ContainsSubstring("summable"));
}

TEST_CASE("mixingale integral") {
  const auto a = mixingale_integral_13(QuantileFunction::constant(1.0),
                                       AlphaSequence::geometric(0.25, 0.5), 200);
  CHECK(a.verdict == Verdict::kSatisfied);
  CHECK_THAT(*a.value, WithinRel(0.25, 1e-10));

  const auto m = mixingale_integral_13(QuantileFunction::power(1.0, 0.25),
                                       AlphaSequence::m_dependent(0.25, 3), 100);
  CHECK(m.verdict == Verdict::kSatisfied);
  CHECK_THAT(*m.value, WithinRel(3.0 * 2.0 * std::sqrt(0.25), 1e-9));

  const auto p = mixingale_integral_13(QuantileFunction::power(1.0, 0.25), AlphaSequence::power(1.0, 3.0), 1000);
  CHECK(p.verdict == Verdict::kSatisfied);
  CHECK_THAT(*p.value, WithinAbs(2.0 * zeta(1.5), 1e-3));
  CHECK_THAT(2.0 * zeta(1.5), WithinAbs(5.2248, 1e-4));
  // term_k = 2 k^{-3/2}
  CHECK_THAT(p.partial_sums.front().second, WithinRel(2.0, 1e-10));

  CHECK_THROWS_AS(mixingale_integral_13(QuantileFunction::constant(1.0),
                                        AlphaSequence::power(1.0, -1.0), 10),
                  PreconditionError);
}

TEST_CASE("moment form") {
  const auto good = moment_form_sufficient(4.0, AlphaSequence::power(1.0, 3.0), 1000);
  CHECK(good.verdict == Verdict::kSatisfied);
  CHECK_THAT(*good.value, WithinAbs(std::numbers::pi * std::numbers::pi / 6.0, 1e-5));
  const auto bad = moment_form_sufficient(4.0, AlphaSequence::power(1.0, 1.5), 1000);
  CHECK(bad.verdict == Verdict::kViolated);
  CHECK(bad.partial_sums.back().second > std::log(1001.0));
  const auto zero = moment_form_sufficient(3.0, AlphaSequence::zero(), 10);
  CHECK(zero.verdict == Verdict::kSatisfied);
  CHECK(*zero.value == 0.0);
  CHECK_THROWS_AS(moment_form_sufficient(2.0, AlphaSequence::zero(), 10), PreconditionError);
}

TEST_CASE("covariance bound probe for the product model") {
  const innovations::MdsProductModel model;
  for (std::int64_t k : {0, 1, 2}) {
    for (std::int64_t j : {0, 1}) {
      const auto r = rio_bound_probe(model, k, j, 200000, 31 + 7 * k + j);
      CHECK(r.holds);
      CHECK(r.lhs <= r.rhs + 4.0 * r.std_error);
    }
  }
}
