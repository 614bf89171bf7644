#include <catch_amalgamated.hpp>

#include <boost/math/distributions/normal.hpp>

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "lpclt/harness.hpp"
#include "lpclt/numeric.hpp"

using namespace lpclt;
using namespace lpclt::harness;
using innovations::InnovationModel;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("KS distance of an exact quantile grid") {
  // x_i = F^{-1}((i - 1/2)/m) sits half a step from both ECDF edges.
  for (int m : {10, 257, 4000}) {
    std::vector<double> xs;
    for (int i = m; i >= 1; --i) xs.push_back(boost::math::quantile(boost::math::normal(), (i - 0.5) / m));
    CHECK_THAT(ks_distance(xs, [](double x) { return normal_cdf(x); }), WithinAbs(0.5 / m, 1e-12));
  }
  std::vector<double> shifted(100, 5.0);
  CHECK_THAT(ks_distance(shifted, [](double x) { return normal_cdf(x); }), WithinAbs(1.0, 1e-6));
  CHECK_THAT(ks_critical_value(2000, 0.05), WithinRel(std::sqrt(-std::log(0.025) / 2) / std::sqrt(2000.0), 1e-14));
}

TEST_CASE("parallel_for visits every index once") {
  for (int workers : {1, 3, 8}) {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(1000, workers, [&](std::int64_t i) { hits[static_cast<std::size_t>(i)]++; });
    for (auto& h : hits) CHECK(h.load() == 1);
  }
  auto fail = [](std::int64_t i) {
    if (i == 17 || i == 400) throw std::runtime_error("index " + std::to_string(i));
  };
  CHECK_THROWS_WITH(parallel_for(500, 1, fail), "index 17");
  CHECK_THROWS_WITH(parallel_for(500, 4, fail), "index 17");
}

TEST_CASE("replicate values do not depend on the worker count") {
  SimulationConfig c;
  c.model = InnovationModel::causal_linear(innovations::CausalCoefficients::geometric(0.5));
  c.weights = weights::WeightSequence::power_decay(0.75);
  c.n = 64;
  c.replicates = 200;
  c.rel_tail_tol = 0.05;
  c.master_seed = 99;
  c.workers = 1;
  const auto a = replicate_values(c);
  c.workers = 4;
  const auto b = replicate_values(c);
  REQUIRE(a.size() == 200);
  CHECK(a == b);
  c.master_seed = 100;
  CHECK(replicate_values(c) != a);
}

TEST_CASE("mixture targets") {
  CHECK_THROWS_AS(mixture_cdf({{0.5, 1.0}, {0.4, 2.0}}), PreconditionError);
  CHECK_THROWS_AS(mixture_cdf({{1.0, 0.0}}), PreconditionError);
  CHECK_THROWS_AS(mixture_cdf({{1.5, 1.0}, {-0.5, 1.0}}), PreconditionError);
  const auto t = mixture_cdf({{0.5, 1.0}, {0.5, 4.0}});
  CHECK_THAT(t.variance(), WithinRel(2.5, 1e-15));
  CHECK_THAT(t(1.0), WithinRel(0.5 * normal_cdf(1.0) + 0.5 * normal_cdf(0.5), 1e-15));
  CHECK(t(0.0) == 0.5);

  const auto iid = default_target(InnovationModel::iid());
  CHECK_THAT(iid.variance(), WithinRel(1.0, 1e-14));
  const auto geo =
      default_target(InnovationModel::causal_linear(innovations::CausalCoefficients::geometric(0.5)));
  CHECK_THAT(geo.variance(), WithinRel(4.0, 1e-10));
  const auto mix = default_target(InnovationModel::nonergodic_scale({{0.5, 1.0}, {0.5, 2.0}}));
  REQUIRE(mix.components().size() == 2);
  CHECK_THAT(mix.components()[1].variance, WithinRel(4.0, 1e-14));
}

TEST_CASE("iid partial sums pass the CLT check") {
  SimulationConfig c;
  c.n = 256;
  c.replicates = 2000;
  c.master_seed = 7;
  c.ks_threshold = ks_critical_value(c.replicates, 0.01);
  const auto r = monte_carlo_clt(c);
  CHECK(r.pass);
  CHECK(r.ks_distance < r.ks_threshold);
  CHECK_THAT(r.empirical_mean, WithinAbs(0.0, 4.0 / std::sqrt(2000.0)));
  const auto v = empirical_variance_ratio(c);
  CHECK(std::fabs(v.ratio - 1.0) < v.ci_halfwidth);
  CHECK_THAT(v.ci_halfwidth, WithinRel(1.96 * std::sqrt(2.0 / 1999.0) * v.ratio, 1e-12));
}

TEST_CASE("martingale differences are normal with variance E xi^2") {
  SimulationConfig c;
  c.model = InnovationModel::mds_product();
  c.n = 128;
  c.replicates = 2000;
  c.master_seed = 11;
  c.target = default_target(c.model);
  c.ks_threshold = ks_critical_value(c.replicates, 0.01);
  CHECK_THAT(c.target.variance(), WithinRel(c.model.second_moment(), 1e-12));
  const auto r = monte_carlo_clt(c);
  CHECK(r.pass);
  // The wrong target is rejected.
  c.target = mixture_cdf({{1.0, 2.0 * c.model.second_moment()}});
  CHECK_FALSE(monte_carlo_clt(c).pass);
}

TEST_CASE("scale mixture converges to a normal mixture") {
  SimulationConfig c;
  c.model = InnovationModel::nonergodic_scale({{0.5, 1.0}, {0.5, 3.0}});
  c.n = 64;
  c.replicates = 2000;
  c.master_seed = 5;
  c.target = default_target(c.model);
  c.ks_threshold = ks_critical_value(c.replicates, 0.01);
  CHECK(monte_carlo_clt(c).pass);
  c.target = mixture_cdf({{1.0, 5.0}});  // same variance, wrong shape
  CHECK_FALSE(monte_carlo_clt(c).pass);
}

TEST_CASE("weighted square functional") {
  const auto model = InnovationModel::iid();
  const auto w = weights::window_coefficients(weights::WeightSequence::power_decay(0.75), 100, 0.05);
  const auto path = innovations::sample_path(model, {w.j_lo, w.j_hi}, 3);
  CompensatedSum s;
  for (std::int64_t j = w.j_lo; j <= w.j_hi; ++j) {
    const double b = w.at(j);
    const double x = path[static_cast<std::size_t>(j - w.j_lo)];
    s.add(b * b * x * x);
  }
  CHECK_THAT(weighted_square_functional(w, path), WithinRel(s.value() / w.stored_sq, 1e-14));

  // Rademacher innovations square to 1 exactly.
  const auto rad = InnovationModel::iid(innovations::IidDistribution::kRademacher);
  CHECK_THAT(weighted_square_functional(rad, weights::WeightSequence::partial_sum_delta(), 50, 1, 1e-3),
             WithinRel(1.0, 1e-14));
  // LLN for normal innovations over a long flat window.
  CHECK_THAT(weighted_square_functional(model, weights::WeightSequence::partial_sum_delta(), 100000, 2, 1e-3),
             WithinAbs(1.0, 0.02));
}

TEST_CASE("variance ratio needs enough replicates") {
  std::vector<double> few(29, 1.0);
  CHECK_THROWS_AS(variance_ratio_from(few), PreconditionError);
}
