#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "lpclt/innovations.hpp"
#include "lpclt/numeric.hpp"
#include "lpclt/random.hpp"

using namespace lpclt;
using namespace lpclt::innovations;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

Moments moments(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  const double m = s / static_cast<double>(x.size());
  double q = 0.0;
  for (double v : x) q += (v - m) * (v - m);
  return {m, q / static_cast<double>(x.size() - 1)};
}

}  // namespace

TEST_CASE("iid normal path moments") {
  const auto x = sample_path(InnovationModel::iid(), {0, 99999}, 1);
  const auto m = moments(x);
  CHECK(std::fabs(m.mean) < 0.02);
  CHECK(std::fabs(m.var - 1.0) < 0.03);
}

TEST_CASE("unit-variance iid laws") {
  for (auto d : {IidDistribution::kRademacher, IidDistribution::kCenteredUniform}) {
    const auto model = InnovationModel::iid(d);
    CHECK(model.second_moment() == 1.0);
    const auto m = moments(sample_path(model, {0, 199999}, 5));
    CHECK(std::fabs(m.mean) < 4.0 / std::sqrt(2e5));
    CHECK(std::fabs(m.var - 1.0) < 0.02);
  }
}

TEST_CASE("paths are pure functions of index and seed") {
  const std::vector<InnovationModel> models{
      InnovationModel::iid(), InnovationModel::mds_product(),
      InnovationModel::causal_linear(CausalCoefficients::geometric(0.5)),
      InnovationModel::causal_linear(CausalCoefficients::table({1.0, 0.5, 0.25})),
      InnovationModel::bernoulli_shift(maps::CatalogMap::linear()),
      InnovationModel::nonergodic_scale({{0.5, 1.0}, {0.5, 2.0}})};
  for (const auto& m : models) {
    const auto a = sample_path(m, {-20, 99}, 77);
    const auto b = sample_path(m, {-20, 99}, 77);
    CHECK(a == b);
    const auto c = sample_path(m, {30, 149}, 77);
    for (int i = 0; i < 70; ++i) CHECK_THAT(c[i], WithinAbs(a[i + 50], 1e-9));
    CHECK(sample_path(m, {0, 9}, 78) != sample_path(m, {0, 9}, 77));
  }
}

TEST_CASE("nonergodic paths concentrate on one component") {
  const auto model = InnovationModel::nonergodic_scale({{0.5, 1.0}, {0.5, 2.0}});
  int low = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const double v = moments(sample_path(model, {0, 9999}, split_seed(11, s))).var;
    const bool near1 = std::fabs(v - 1.0) < 0.1;
    const bool near4 = std::fabs(v - 4.0) < 0.4;
    CHECK((near1 || near4));
    CHECK(std::fabs(v - 2.5) > 1.0);
    low += near1;
    const auto& ne = std::get<NonergodicScaleModel>(model.kind());
    CHECK(realized_component(ne, split_seed(11, s)) == (near1 ? 0u : 1u));
  }
  CHECK(low > 60);
  CHECK(low < 140);
}

TEST_CASE("martingale difference product model") {
  const auto model = InnovationModel::mds_product();
  CHECK(model.is_martingale_difference());
  const auto x = sample_path(model, {0, 1000000}, 3);
  double s = 0.0, q = 0.0;
  for (std::size_t k = 0; k + 1 < x.size(); ++k) {
    const double t = x[k + 1] * (x[k] > 0 ? 1.0 : -1.0);
    s += t;
    q += t * t;
  }
  const double m = static_cast<double>(x.size() - 1);
  const double se = std::sqrt((q / m - (s / m) * (s / m)) / m);
  CHECK(std::fabs(s / m) < 4.0 * se);
  CHECK_THAT(moments(x).var, WithinRel(model.second_moment(), 0.01));
}

TEST_CASE("causal-linear projection norms and tails") {
  const auto u = CausalCoefficients::geometric(0.5);
  for (int k = 0; k < 10; ++k) CHECK(u.at(k) == std::ldexp(1.0, -k));
  CHECK_THAT(u.sum_from(3), WithinRel(0.25, 1e-15));
  const auto b = u.sq_sum_from(2);
  CHECK_THAT(b.lower, WithinRel(1.0 / 16.0 / 0.75, 1e-14));
  CHECK_THROWS_AS(CausalCoefficients::table({1.0, -0.1}), PreconditionError);
}

TEST_CASE("bit depth controls the Bernoulli truncation") {
  const auto lo = sample_path(InnovationModel::bernoulli_shift(maps::CatalogMap::linear(), 40),
                              {0, 9999}, 9);
  const auto hi = sample_path(InnovationModel::bernoulli_shift(maps::CatalogMap::linear(), 48),
                              {0, 9999}, 9);
  double ss = 0.0;
  for (std::size_t i = 0; i < lo.size(); ++i) ss += (lo[i] - hi[i]) * (lo[i] - hi[i]);
  CHECK(std::sqrt(ss / static_cast<double>(lo.size())) < std::ldexp(1.0, -20));
  CHECK_THROWS_AS(sample_path(InnovationModel::bernoulli_shift(maps::CatalogMap::linear(), 20),
                              {0, 9}, 1),
                  CertificationError);
  CHECK_NOTHROW(sample_path(
      InnovationModel::bernoulli_shift(maps::CatalogMap::half_indicator(), 1), {0, 9}, 1));
}

TEST_CASE("Bernoulli shift of the identity has variance 1/12") {
  const auto x = sample_path(InnovationModel::bernoulli_shift(maps::CatalogMap::linear()),
                             {0, 199999}, 4);
  const auto m = moments(x);
  CHECK(std::fabs(m.mean) < 0.005);
  CHECK_THAT(m.var, WithinRel(1.0 / 12.0, 0.02));
}

TEST_CASE("counterexample weights for psi = 1/log(n+2)") {
  const auto c = proposition3_weights(NullSequence::inverse_log(), 1'000'000);
  REQUIRE(c.n.size() >= 2);
  CHECK(c.n[0] == 1);
  // log(j + 2) >= 4 first holds at j = ceil(e^4) - 2.
  CHECK(c.n[1] == static_cast<std::int64_t>(std::ceil(std::exp(4.0))) - 2);
  CHECK(c.n[1] == 53);
  CHECK(verify_invariants(c).all());
  CHECK(c.u[0] == 1.0);
  for (std::size_t k = 1; k < c.n.size(); ++k) {
    for (std::int64_t j = c.n[k - 1]; j < c.n[k]; ++j) {
      CHECK(c.coefficient(j) == 1.0 / static_cast<double>(c.n[k]));
    }
  }
  double s = 0.0;
  for (double v : c.u) s += v;
  CHECK(s >= static_cast<double>(c.completed_blocks()) / 2.0);
}

TEST_CASE("counterexample with a vanishing psi doubles the blocks") {
  const auto c = proposition3_weights(NullSequence::zero(), 1000);
  const std::vector<std::int64_t> expected{1, 3, 7, 15, 31, 63, 127, 255, 511};
  CHECK(c.n == expected);
  CHECK(c.coefficient(200) == 1.0 / 255.0);
  CHECK(verify_invariants(c).all());
  CHECK_THROWS_AS(c.coefficient(c.materialized_length()), PreconditionError);
}

TEST_CASE("counterexample level not reached") {
  CHECK_THROWS_WITH(proposition3_weights(NullSequence::power(1.0, 0.01), 1000),
                    ContainsSubstring("level"));
}

TEST_CASE("dyadic projection norms") {
  for (int n : {1, 3, 10, 25, 40, 52}) {
    const double exact = std::ldexp(1.0, -n) / std::sqrt(12.0);
    const double q = bernoulli_dyadic_projection_norm(maps::CatalogMap::linear(), n, 256);
    if (n <= 25) {
      CHECK_THAT(q, WithinRel(exact, 1e-9));
    } else {
      CHECK_THAT(q, WithinAbs(exact, 1e-15));
    }
    CHECK(bernoulli_dyadic_projection_norm(maps::CatalogMap::half_indicator(), n, 256) ==
          Catch::Approx(0.0).margin(1e-15));
  }
}

TEST_CASE("dyadic projection norm of x^2 against Monte Carlo") {
  const int n = 10;
  const double h = std::ldexp(1.0, -n);
  const CounterRng rng(12, Stream::kAuxiliary);
  const int draws = 1000000;
  double s = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double x = rng.uniform(i);
    const double a = std::floor(x / h) * h;
    const double cell_mean = ((a + h) * (a + h) * (a + h) - a * a * a) / (3.0 * h);
    s += (x * x - cell_mean) * (x * x - cell_mean);
  }
  const double mc = std::sqrt(s / draws);
  const double q = bernoulli_dyadic_projection_norm(maps::CatalogMap::square(), n, 4096);
  CHECK_THAT(q, WithinAbs(mc, 1e-3));
  CHECK_THAT(q, WithinRel(mc, 1e-2));
}
