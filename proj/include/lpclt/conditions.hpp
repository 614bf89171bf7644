#pragma once

// Sufficient conditions for the CLT evaluated against a model's analytic
// certificates. A verdict is "satisfied" only with a certified finite value
// and "violated" only with a lower-bound growth certificate; anything else
// is "inconclusive".

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lpclt/innovations.hpp"
#include "lpclt/maps.hpp"

namespace lpclt::conditions {

enum class Verdict { kSatisfied, kViolated, kInconclusive };

[[nodiscard]] std::string_view to_string(Verdict v) noexcept;

struct ConditionReport {
  std::string condition_id;
  Verdict verdict = Verdict::kInconclusive;
  std::optional<double> value;  // empty when no finite value is certified
  double tail_bound = 0.0;      // bound on the omitted tail (inf when none)
  std::vector<std::pair<std::int64_t, double>> partial_sums;
  std::string notes;
};

// ---------------------------------------------------------------------------
// Gamma_j = sum_k |E[xi_k E(xi_0 | F_{-j})]|.

/// Projection route: sum_{i>=j} u_i sum_{m>=i} u_m for causal-linear models,
/// E xi_0^2 * 1{j = 0} for martingale differences. Returns +inf when the
/// series is certified divergent. Throws CertificationError ("inconclusive:
/// no analytic conditional structure") otherwise.
[[nodiscard]] double gamma_j(const innovations::InnovationModel& model, std::int64_t j,
                             std::int64_t k_cap);

/// Direct route for causal-linear models: sum_{k=0}^{k_cap} sum_{i=j}^{j+k_cap}
/// u_{k+i} u_i, in the opposite summation order.
[[nodiscard]] double gamma_j_double_sum(const innovations::CausalCoefficients& u,
                                        std::int64_t j, std::int64_t k_cap);

/// (1/p) sum_{j=1}^p Gamma_j.
[[nodiscard]] double cesaro_gamma(const innovations::InnovationModel& model, std::int64_t p);

/// gamma-series: Gamma_j finite for every j (trace of Gamma_j at j = 0, 1, 2, 4, ...).
[[nodiscard]] ConditionReport gamma_report(const innovations::InnovationModel& model);

/// cesaro-gamma: trace of the Cesaro mean over p = 2^1 .. 2^max_log2.
[[nodiscard]] ConditionReport cesaro_report(const innovations::InnovationModel& model,
                                            int max_log2 = 10);

/// projective: sum_{i>=1} ||P_{-i}(xi_0)||_2.
[[nodiscard]] ConditionReport projective_sum(const innovations::InnovationModel& model);

/// maxwell-woodroofe: sum_n n^{-1/2} ||E(xi_n | F_0)||_2.
[[nodiscard]] ConditionReport maxwell_woodroofe_sum(const innovations::InnovationModel& model,
                                                    std::int64_t n_cap);

/// The psi-weighted variant sum_n psi_n n^{-1/2} ||E(xi_n | F_0)||_2 for the
/// counterexample model (and trivially for the others).
[[nodiscard]] ConditionReport maxwell_woodroofe_weighted(
    const innovations::InnovationModel& model, const innovations::NullSequence& psi,
    std::int64_t n_cap);

/// functional-iid: sum_n n^{-1/2} ||xi_0 - E(xi_0 | first n digits)||_2.
[[nodiscard]] ConditionReport functional_iid_sum(const maps::CatalogMap& g, int n_cap,
                                                 int quadrature_points = 4096);

/// int_0^{1-d} [g(x + d) - g(x)]^2 dx.
[[nodiscard]] double diagonal_increment(const maps::CatalogMap& g, double d);

/// diagonal-integral via diagonal shells |x - y| in [2^{-m-1}, 2^{-m}).
[[nodiscard]] ConditionReport bernoulli_integral_11(const maps::CatalogMap& g, double t,
                                                    int shells);

// ---------------------------------------------------------------------------
// Mixingale-type conditions.

/// Quantile function Q of |xi_0|: constant c, or c u^{-e} with 0 <= e < 1/2.
class QuantileFunction {
 public:
  static QuantileFunction constant(double c);
  static QuantileFunction power(double c, double exponent);

  [[nodiscard]] double operator()(double u) const;
  /// int_0^a Q(u)^2 du in closed form.
  [[nodiscard]] double integral_sq(double a) const;
  [[nodiscard]] std::string describe() const;
  [[nodiscard]] double c() const noexcept { return c_; }
  [[nodiscard]] double exponent() const noexcept { return e_; }

 private:
  QuantileFunction(double c, double e) : c_(c), e_(e) {}
  double c_;
  double e_;
};

/// Analytic coefficient sequences alpha(k), k >= 1.
class AlphaSequence {
 public:
  enum class Kind { kPower, kGeometric, kMDependent, kZero };

  /// c k^{-s}
  static AlphaSequence power(double c, double s);
  /// c r^k
  static AlphaSequence geometric(double c, double r);
  /// c for k <= m, 0 afterwards
  static AlphaSequence m_dependent(double c, std::int64_t m);
  static AlphaSequence zero();

  [[nodiscard]] double operator()(std::int64_t k) const;
  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] double c() const noexcept { return c_; }
  [[nodiscard]] double rate() const noexcept { return rate_; }
  [[nodiscard]] std::int64_t m() const noexcept { return m_; }
  [[nodiscard]] std::string describe() const;

 private:
  AlphaSequence(Kind k, double c, double rate, std::int64_t m)
      : kind_(k), c_(c), rate_(rate), m_(m) {}
  Kind kind_;
  double c_;
  double rate_;
  std::int64_t m_;
};

/// mixingale-integral: sum_k int_0^{alpha(k)} Q^2, per-term adaptive quadrature.
/// `family` is echoed in the notes ("alpha-bar" or "alpha").
[[nodiscard]] ConditionReport mixingale_integral_13(const QuantileFunction& q,
                                                    const AlphaSequence& alpha,
                                                    std::int64_t k_cap,
                                                    std::string_view family = "alpha-bar");

/// moment-form: sum_k k^{2/(t-2)} alpha(k).
[[nodiscard]] ConditionReport moment_form_sufficient(double t, const AlphaSequence& alpha,
                                                     std::int64_t k_cap);

struct RioProbe {
  double lhs = 0.0;       // Monte Carlo |E[xi_k E(xi_0 | F_{-j})]|
  double std_error = 0.0;
  double rhs = 0.0;       // 2 int_0^{2 alpha(k + j)} Q^2
  bool holds = false;     // lhs <= rhs + 4 std_error
};

/// Covariance bound probe for the martingale-difference product model with
/// the envelope alpha(k) = 1/4 for k <= 1 and 0 afterwards.
[[nodiscard]] RioProbe rio_bound_probe(const innovations::MdsProductModel& model,
                                       std::int64_t k, std::int64_t j, std::int64_t draws,
                                       std::uint64_t seed);

/// int_0^v Q^2 for |xi_0| under the product model (numeric, exact law).
[[nodiscard]] double mds_quantile_sq_integral(const innovations::PredictableFactor& h, double v);

}  // namespace lpclt::conditions
