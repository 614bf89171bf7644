#pragma once

// Autocovariances gamma(k), the spectral density at any frequency, the
// long-run variance 2 pi f(0), and exact weighted variances
// E(sum d_j xi_j)^2 computed from the Toeplitz structure.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lpclt/innovations.hpp"
#include "lpclt/weights.hpp"

namespace lpclt::spectral {

enum class AutocovSource { kAnalytic, kTruncatedSeries };

struct AutocovarianceFunction {
  std::vector<double> values;  // gamma(0), ..., gamma(k_max)
  /// Bound on sum_{k > k_max} |gamma(k)|; +inf when not certified.
  double tail_bound = 0.0;
  /// Bound on the error of each stored value (truncated inner series).
  double value_error = 0.0;
  AutocovSource source = AutocovSource::kAnalytic;
  /// gamma(k) = 0 exactly for k > zero_beyond (-1: unknown).
  std::int64_t zero_beyond = -1;
  /// Closed form valid at every lag, when one exists.
  std::function<double(std::int64_t)> closed_form;

  [[nodiscard]] std::int64_t k_max() const noexcept {
    return static_cast<std::int64_t>(values.size()) - 1;
  }
  /// gamma(|k|). Beyond k_max uses the closed form or a certified zero;
  /// throws PreconditionError when neither is available.
  [[nodiscard]] double at(std::int64_t k) const;
  /// Whether lags beyond k_max are available (closed form, exact zeros or a
  /// finite tail bound).
  [[nodiscard]] bool extends_beyond_kmax() const noexcept;
};

/// gamma(k) = sum_j u_{k+j} u_j. The counterexample coefficients get a
/// truncated-series result with a Cauchy-Schwarz value error and an
/// uncertified tail.
[[nodiscard]] AutocovarianceFunction autocov_causal_linear(
    const innovations::CausalCoefficients& u, std::int64_t k_max);

/// Autocovariance of any catalog model; throws CertificationError when the
/// model has none in closed form.
[[nodiscard]] AutocovarianceFunction autocovariance(const innovations::InnovationModel& model,
                                                    std::int64_t k_max);

struct LongRunVariance {
  enum class Status { kFinite, kPossiblyUnbounded };
  Status status = Status::kFinite;
  double value = 0.0;        // gamma(0) + 2 sum_{k=1}^{k_max} gamma(k)
  double error_bound = 0.0;  // 2 * tail_bound (+ stored value errors)
  std::vector<std::pair<std::int64_t, double>> partial_sums;  // at powers of two
  [[nodiscard]] bool finite() const noexcept { return status == Status::kFinite; }
};

[[nodiscard]] LongRunVariance long_run_variance(const AutocovarianceFunction& g);

/// f(lambda) = (gamma(0) + 2 sum gamma(k) cos(k lambda)) / (2 pi) over the stored lags.
[[nodiscard]] double spectral_density(const AutocovarianceFunction& g, double lambda);

/// gamma(0) + 2 sum_{k>=1} |gamma(k)| including the tail bound (= 2 pi sup|f|
/// bound).
[[nodiscard]] double absolute_covariance_sum(const AutocovarianceFunction& g);

/// w(m) = sum_j d_j d_{j+m} for m = 0..max_lag (FFT for long inputs).
[[nodiscard]] std::vector<double> lag_products(std::span<const double> d, std::int64_t max_lag);

/// sum_j sum_k d_j d_k gamma(j - k).
[[nodiscard]] double weighted_variance(const AutocovarianceFunction& g, std::span<const double> d);

struct VarianceRatioPoint {
  std::int64_t n = 0;
  double var_sn = 0.0;  // Var(S_n) over the stored support
  double bn_sq = 0.0;   // sum of stored b_{n,j}^2
  double ratio = 0.0;
};

/// Var(S_n) / b_n^2 with both sides taken over the certified support.
[[nodiscard]] std::vector<VarianceRatioPoint> variance_ratio_trace(
    const weights::WeightSequence& a, const AutocovarianceFunction& g,
    std::span<const std::int64_t> n_list, double rel_tail_tol);

/// sum_j |d_j - d_{j-1}|^2 / sum_j d_j^2 (zero-extended); throws for a zero array.
[[nodiscard]] double smoothness_condition_A3(std::span<const double> d);

/// weighted_variance(g, d) <= absolute_covariance_sum(g) * sum d^2 on
/// seeded random instances: g from the analytic catalog (geometric and table
/// causal-linear, Bernoulli linear and square maps, iid), d Gaussian of
/// length 1..200.
[[nodiscard]] weights::PropertySummary covariance_bound_suite(std::int64_t instances,
                                                              std::uint64_t seed);

/// sum_{k=0}^{K} gamma(k) at K = 1, 2, 4, ..., k_max.
[[nodiscard]] std::vector<std::pair<std::int64_t, double>> covariance_partial_sums(
    const AutocovarianceFunction& g);

}  // namespace lpclt::spectral
