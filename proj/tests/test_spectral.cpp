#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "lpclt/numeric.hpp"
#include "lpclt/random.hpp"
#include "lpclt/spectral.hpp"

using namespace lpclt;
using namespace lpclt::spectral;
using innovations::CausalCoefficients;
using innovations::InnovationModel;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const InnovationModel kGeo = InnovationModel::causal_linear(CausalCoefficients::geometric(0.5));
const InnovationModel kBern = InnovationModel::bernoulli_shift(maps::CatalogMap::linear());

// sum_{j<terms} u_{k+j} u_j for u_i = rho^i.
double geometric_double_sum(double rho, int k, int terms) {
  double s = 0.0;
  for (int j = 0; j < terms; ++j) s += std::pow(rho, k + j) * std::pow(rho, j);
  return s;
}

double direct_bilinear(const AutocovarianceFunction& g, const std::vector<double>& d) {
  double s = 0.0;
  for (std::size_t j = 0; j < d.size(); ++j) {
    for (std::size_t k = 0; k < d.size(); ++k) {
      s += d[j] * d[k] * g.at(static_cast<std::int64_t>(j) - static_cast<std::int64_t>(k));
    }
  }
  return s;
}

}  // namespace

TEST_CASE("autocovariance of a delta filter") {
  const auto g = autocov_causal_linear(CausalCoefficients::table({1.0}), 10);
  CHECK(g.at(0) == 1.0);
  for (int k = 1; k <= 10; ++k) CHECK(g.at(k) == 0.0);
  CHECK(g.at(500) == 0.0);
}

TEST_CASE("geometric autocovariance against the truncated double sum") {
  const auto g = autocov_causal_linear(CausalCoefficients::geometric(0.5), 40);
  CHECK_THAT(g.at(0), WithinRel(4.0 / 3.0, 1e-15));
  CHECK_THAT(g.at(1), WithinRel(2.0 / 3.0, 1e-15));
  for (int k = 0; k <= 40; ++k) {
    CHECK_THAT(g.at(k), WithinAbs(geometric_double_sum(0.5, k, 200), 1e-12));
    CHECK_THAT(g.at(k), WithinRel(std::pow(0.5, k) * 4.0 / 3.0, 1e-14));
  }
  CHECK(g.at(-3) == g.at(3));
}

TEST_CASE("long-run variances") {
  CHECK(long_run_variance(autocovariance(InnovationModel::iid(), 16)).value == 1.0);
  const auto geo = long_run_variance(autocovariance(kGeo, 200));
  CHECK(geo.finite());
  CHECK_THAT(geo.value, WithinAbs(4.0, std::max(2.0 * geo.error_bound, 1e-12)));
  double direct = 0.0;
  for (int k = 1; k < 200; ++k) direct += std::pow(0.5, k);
  CHECK_THAT((4.0 / 3.0) * (1.0 + 2.0 * direct), WithinRel(4.0, 1e-12));

  const auto tab = std::vector<double>{1.0, 0.3, 0.2, 0.7};
  const auto lt = long_run_variance(autocov_causal_linear(CausalCoefficients::table(tab), 8));
  CHECK_THAT(lt.value, WithinRel(2.2 * 2.2, 1e-14));
}

TEST_CASE("Bernoulli shift of the identity") {
  const auto g = autocovariance(kBern, 30);
  for (int m = 0; m <= 30; ++m) {
    // xi = sum_k 2^{-k-1} (eps_{-k} - 1/2), bits of variance 1/4.
    double s = 0.0;
    for (int k = 0; k < 60; ++k) s += std::ldexp(1.0, -k - 1) * std::ldexp(1.0, -k - m - 1) * 0.25;
    CHECK_THAT(g.at(m), WithinRel(s, 1e-13));
    CHECK_THAT(g.at(m), WithinRel(std::ldexp(1.0, -m) / 12.0, 1e-15));
  }
  CHECK_THAT(long_run_variance(g).value, WithinAbs(0.25, 1e-9));
}

TEST_CASE("weighted variance examples") {
  const std::vector<double> d{1.0, 1.0};
  CHECK(weighted_variance(autocovariance(InnovationModel::iid(), 4), d) == 2.0);
  CHECK_THAT(weighted_variance(autocovariance(kGeo, 4), d), WithinRel(4.0, 1e-15));
}

TEST_CASE("weighted variance against the direct bilinear form") {
  const CounterRng rng(5, Stream::kAuxiliary);
  std::vector<double> d(300);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = rng.normal(static_cast<std::int64_t>(i));
  for (const auto& m : {kGeo, kBern, InnovationModel::causal_linear(CausalCoefficients::table({1.0, 0.5, 0.2}))}) {
    const auto g = autocovariance(m, 299);
    CHECK_THAT(weighted_variance(g, d), WithinRel(direct_bilinear(g, d), 1e-11));
  }
}

TEST_CASE("lag products: transform path agrees with direct sums") {
  const CounterRng rng(6, Stream::kAuxiliary);
  std::vector<double> d(5000);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = rng.uniform(static_cast<std::int64_t>(i));
  const auto w = lag_products(d, 4999);
  double scale = 0.0;
  for (double x : d) scale += x * x;
  for (std::int64_t m : {0, 1, 2, 17, 1000, 4998, 4999}) {
    double s = 0.0;
    for (std::size_t j = 0; j + static_cast<std::size_t>(m) < d.size(); ++j) s += d[j] * d[j + m];
    CHECK_THAT(w[m], WithinAbs(s, 1e-12 * scale));
  }
  CHECK_THAT(w[0], WithinRel(scale, 1e-14));
}

TEST_CASE("covariance bound and positive semidefiniteness") {
  const auto s = covariance_bound_suite(100, 17);
  CHECK(s.failures == 0);
  CHECK(s.max_ratio <= 1.0);
  const CounterRng rng(8, Stream::kAuxiliary);
  std::int64_t idx = 0;
  for (const auto& m : {InnovationModel::iid(), kGeo, kBern,
                        InnovationModel::bernoulli_shift(maps::CatalogMap::square()),
                        InnovationModel::bernoulli_shift(maps::CatalogMap::half_indicator())}) {
    const auto g = autocovariance(m, 64);
    for (int r = 0; r < 100; ++r) {
      std::vector<double> d(1 + rng.bits64(idx++) % 64);
      for (auto& v : d) v = rng.normal(idx++);
      CHECK(weighted_variance(g, d) >= -1e-9);
    }
  }
}

TEST_CASE("spectral density of the geometric filter") {
  const auto g = autocovariance(kGeo, 200);
  const double bound = absolute_covariance_sum(g) / (2.0 * std::numbers::pi);
  for (int i = 0; i < 1024; ++i) {
    const double lambda = -std::numbers::pi + 2.0 * std::numbers::pi * i / 1024.0;
    // |sum u_i e^{i i lambda}|^2 / (2 pi) = 1 / (2 pi |1 - rho e^{i lambda}|^2)
    const double exact =
        1.0 / (2.0 * std::numbers::pi * std::norm(1.0 - 0.5 * std::polar(1.0, lambda)));
    const double f = spectral_density(g, lambda);
    CHECK_THAT(f, WithinAbs(exact, 1e-12));
    CHECK(std::fabs(f) <= bound);
  }
}

TEST_CASE("variance ratio traces") {
  const std::vector<std::int64_t> ns{1, 7, 64, 1000};
  for (const auto& p :
       variance_ratio_trace(weights::WeightSequence::partial_sum_delta(),
                            autocovariance(InnovationModel::iid(), 4), ns, 1e-6)) {
    CHECK(p.ratio == 1.0);
  }
  const std::vector<std::int64_t> n12{4096};
  const auto geo = variance_ratio_trace(weights::WeightSequence::partial_sum_delta(),
                                        autocovariance(kGeo, 4096), n12, 1e-6);
  CHECK_THAT(geo.front().ratio, WithinRel(4.0, 0.02));

  std::vector<std::int64_t> pw;
  for (int e = 8; e <= 14; ++e) pw.push_back(std::int64_t{1} << e);
  const auto tr = variance_ratio_trace(weights::WeightSequence::power_decay(0.7),
                                       autocovariance(kBern, 4096), pw, 0.02);
  for (std::size_t i = 1; i < tr.size(); ++i) {
    CHECK(std::fabs(tr[i].ratio - 0.25) < std::fabs(tr[i - 1].ratio - 0.25));
  }
  CHECK_THAT(tr.back().ratio, WithinRel(0.25, 0.05));
}

TEST_CASE("smoothness condition shares the weights kernel") {
  const std::vector<double> ones(50, 1.0);
  CHECK_THAT(smoothness_condition_A3(ones), WithinRel(2.0 / 50.0, 1e-15));
  const auto w = weights::window_coefficients(weights::WeightSequence::power_decay(0.7), 4096, 0.02);
  CHECK(smoothness_condition_A3(w.values) == weights::smoothness_ratios(w).r1);
  CHECK_THROWS_AS(smoothness_condition_A3(std::vector<double>(5, 0.0)), PreconditionError);
}

TEST_CASE("counterexample covariances: finite variance, divergent sums") {
  const auto c = innovations::proposition3_weights(innovations::NullSequence::inverse_log(),
                                                   1'000'000);
  const auto len = c.materialized_length();
  const auto u = CausalCoefficients::proposition3(c);
  const auto g = autocov_causal_linear(u, len - 1);
  double g0 = 0.0;
  for (double x : c.u) g0 += x * x;
  CHECK(g.at(0) >= g0 * (1.0 - 1e-12));
  CHECK(g.at(0) <= g0 + c.unmaterialized_sq_bound() + 1e-12);
  CHECK_FALSE(long_run_variance(g).finite());

  // Partial sums sum_{k<=K} gamma(k) over the materialized coefficients,
  // accumulated directly.
  const auto trace = covariance_partial_sums(g);
  double prev = 0.0;
  for (const auto& [K, v] : trace) {
    long double s = 0.0L;
    for (std::int64_t k = 0; k <= K; ++k) {
      for (std::int64_t j = 0; j + k < len; ++j) s += static_cast<long double>(c.u[j]) * c.u[j + k];
    }
    CHECK_THAT(v, WithinRel(static_cast<double>(s), 1e-12));
    CHECK(v > prev);
    prev = v;
  }
  const auto geo = covariance_partial_sums(autocovariance(kGeo, 4096));
  CHECK_THAT(geo.back().second - geo[geo.size() - 2].second, WithinAbs(0.0, 1e-12));
  CHECK(trace.back().second > 4.0 * trace.front().second);
}
