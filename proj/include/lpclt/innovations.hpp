#pragma once

// Stationary innovation models (xi_i), their samplers, and the closed-form
// conditional structure each model exposes. Also houses the counterexample
// coefficients (piecewise-constant u built from a null sequence psi) and
// the dyadic projection norm of Bernoulli shifts.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lpclt/maps.hpp"

namespace lpclt::innovations {

// ---------------------------------------------------------------------------
// Null sequences psi_n (n >= 1).

class NullSequence {
 public:
  enum class Kind { kInverseLog, kPower, kZero };

  /// psi_n = 1 / log(n + shift); shift must be > 1.
  static NullSequence inverse_log(double shift = 2.0);
  /// psi_n = scale * n^{-exponent}; exponent > 0, scale >= 0.
  static NullSequence power(double scale, double exponent);
  static NullSequence zero();

  [[nodiscard]] double operator()(std::int64_t n) const;
  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] double first_parameter() const noexcept { return p1_; }
  [[nodiscard]] double second_parameter() const noexcept { return p2_; }
  [[nodiscard]] std::string describe() const;

 private:
  NullSequence(Kind k, double p1, double p2) : kind_(k), p1_(p1), p2_(p2) {}
  Kind kind_;
  double p1_;
  double p2_;
};

/// Piecewise-constant coefficients u_j = 1/n_{k+1} on [n_k, n_{k+1}), with
/// n_0 = 0 (so u_0 = 1), n_1 = 1, n_{k+1} - n_k > n_{k+1}/2 and
/// psi_j <= 1/k^2 for j >= n_k.
struct Prop3Construction {
  NullSequence psi = NullSequence::zero();
  std::vector<std::int64_t> n;  // n[0] = n_1 = 1, n[1] = n_2, ..., last = n_K
  std::vector<double> u;        // u_0 .. u_{n_K - 1}
  std::int64_t cutoff = 0;

  /// n_k for k >= 1.
  [[nodiscard]] std::int64_t n_at(std::size_t k) const { return n.at(k - 1); }
  /// Number of blocks [n_k, n_{k+1}) fully materialized (k >= 1).
  [[nodiscard]] std::size_t completed_blocks() const noexcept {
    return n.empty() ? 0 : n.size() - 1;
  }
  [[nodiscard]] std::int64_t materialized_length() const noexcept {
    return static_cast<std::int64_t>(u.size());
  }
  /// Upper bound on sum_{i >= n_K} u_i^2 that holds for any continuation of
  /// the construction (n_{k+1} >= 2 n_k + 1): 1 / n_K.
  [[nodiscard]] double unmaterialized_sq_bound() const noexcept {
    return 1.0 / static_cast<double>(n.back());
  }
  /// u_j; 0 for j < 0; throws for j beyond the materialized range.
  [[nodiscard]] double coefficient(std::int64_t j) const;
};

struct Prop3InvariantCheck {
  bool gap = false;        // n_{k+1} - n_k > n_{k+1}/2
  bool level = false;      // psi_j <= 1/k^2 for n_k <= j < materialized end
  bool piecewise = false;  // u_j = 1/n_{k+1} on each block
  std::string detail;
  [[nodiscard]] bool all() const noexcept { return gap && level && piecewise; }
};

/// Throws PreconditionError when psi increases on the inspected range or
/// when n_2 cannot be determined below the cutoff.
[[nodiscard]] Prop3Construction proposition3_weights(const NullSequence& psi,
                                                     std::int64_t cutoff);

[[nodiscard]] Prop3InvariantCheck verify_invariants(const Prop3Construction& c);

// ---------------------------------------------------------------------------
// Causal coefficient sequences u_i >= 0 for xi_k = sum_{i>=0} u_i Y_{k-i}.

struct GeometricCoefficients {
  double ratio = 0.5;
};
struct TableCoefficients {
  std::vector<double> values;
};
using Prop3Coefficients = std::shared_ptr<const Prop3Construction>;

/// Bracket [lower, upper] for a certified real quantity.
struct Bracket {
  double lower = 0.0;
  double upper = 0.0;
  [[nodiscard]] double mid() const noexcept { return 0.5 * (lower + upper); }
};

class CausalCoefficients {
 public:
  using Kind = std::variant<GeometricCoefficients, TableCoefficients, Prop3Coefficients>;

  static CausalCoefficients geometric(double ratio);
  static CausalCoefficients table(std::vector<double> values);
  static CausalCoefficients proposition3(Prop3Construction construction);

  [[nodiscard]] const Kind& kind() const noexcept { return kind_; }
  [[nodiscard]] std::string_view kind_name() const noexcept;

  /// u_i (0 for i < 0). Throws past the known range of a counterexample.
  [[nodiscard]] double at(std::int64_t i) const;
  /// Indices [0, known_length()) are available exactly.
  [[nodiscard]] std::int64_t known_length() const noexcept;
  /// Whether sum u_i is certified finite (false: certified divergent).
  [[nodiscard]] bool summable() const noexcept;
  /// sum_{m >= i} u_m for summable kinds.
  [[nodiscard]] double sum_from(std::int64_t i) const;
  /// sum_{m >= i} u_m^2, bracketed.
  [[nodiscard]] Bracket sq_sum_from(std::int64_t i) const;

 private:
  explicit CausalCoefficients(Kind k);
  Kind kind_;
  // Suffix sums of u and u^2 over the stored entries (tables, counterexample).
  std::shared_ptr<const std::vector<double>> suffix_;
  std::shared_ptr<const std::vector<double>> suffix_sq_;
};

// ---------------------------------------------------------------------------
// Predictable factor h of the martingale-difference product model.

class PredictableFactor {
 public:
  /// h(z) = 1 + scale * tanh(z), |scale| < 1.
  static PredictableFactor tanh(double scale = 0.5);
  /// Piecewise-linear through (knots, values), constant beyond the ends.
  static PredictableFactor table(std::vector<double> knots, std::vector<double> values);

  [[nodiscard]] double operator()(double z) const;
  /// E h(Z)^2 for standard normal Z.
  [[nodiscard]] double second_moment() const noexcept { return second_moment_; }
  /// sup |h|.
  [[nodiscard]] double bound() const noexcept { return bound_; }
  [[nodiscard]] bool is_tanh() const noexcept { return knots_.empty(); }
  [[nodiscard]] double scale() const noexcept { return scale_; }
  [[nodiscard]] const std::vector<double>& knots() const noexcept { return knots_; }
  [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }

 private:
  PredictableFactor() = default;
  void finish();
  double scale_ = 0.0;
  std::vector<double> knots_;
  std::vector<double> values_;
  double second_moment_ = 0.0;
  double bound_ = 0.0;
};

// ---------------------------------------------------------------------------
// Models.

enum class IidDistribution { kNormal, kRademacher, kCenteredUniform };

/// Unit-variance i.i.d. innovations (the uniform law is on [-sqrt 3, sqrt 3]).
struct IidModel {
  IidDistribution distribution = IidDistribution::kNormal;
};

/// xi_k = Z_k h(Z_{k-1}), Z i.i.d. standard normal.
struct MdsProductModel {
  PredictableFactor h = PredictableFactor::tanh();
};

/// xi_k = sum_{i>=0} u_i Y_{k-i}, Y i.i.d. standard normal.
struct CausalLinearModel {
  CausalCoefficients u = CausalCoefficients::geometric(0.5);
};

/// xi_n = g(Y_n) - int g, Y_n = sum_{k>=0} 2^{-k-1} eps_{n-k}, truncated to
/// bit_depth digits plus the midpoint of the remaining interval.
struct BernoulliShiftModel {
  maps::CatalogMap map = maps::CatalogMap::linear();
  int bit_depth = 64;
};

struct ScaleComponent {
  double probability = 1.0;
  double scale = 1.0;
};

/// xi_k = V N_k with V drawn once per path from the components.
struct NonergodicScaleModel {
  std::vector<ScaleComponent> components;
};

struct Certificates {
  bool autocov = false;
  bool projection_norms = false;
  bool cond_exp_norms = false;
  bool gamma_j = false;
};

class InnovationModel {
 public:
  using Kind = std::variant<IidModel, MdsProductModel, CausalLinearModel, BernoulliShiftModel,
                            NonergodicScaleModel>;

  static InnovationModel iid(IidDistribution d = IidDistribution::kNormal);
  static InnovationModel mds_product(PredictableFactor h = PredictableFactor::tanh());
  static InnovationModel causal_linear(CausalCoefficients u);
  static InnovationModel bernoulli_shift(maps::CatalogMap g, int bit_depth = 64);
  static InnovationModel nonergodic_scale(std::vector<ScaleComponent> components);

  [[nodiscard]] const Kind& kind() const noexcept { return kind_; }
  [[nodiscard]] std::string_view kind_name() const noexcept;
  [[nodiscard]] Certificates certificates() const noexcept;

  /// E xi_0^2 (for the counterexample: the midpoint of its bracket).
  [[nodiscard]] double second_moment() const;

  /// Whether E(xi_k | F_{k-1}) = 0 holds by construction.
  [[nodiscard]] bool is_martingale_difference() const noexcept;

 private:
  explicit InnovationModel(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

/// Inclusive index window.
struct IndexRange {
  std::int64_t first = 0;
  std::int64_t last = -1;
  [[nodiscard]] std::int64_t size() const noexcept { return last - first + 1; }
};

/// L2 truncation error allowed in each sampled xi_k.
inline constexpr double kSampleTruncationTol = 1e-10;

/// xi_k for k in range, a pure function of (model, range, seed): the value
/// at index k does not depend on the window it is requested in (up to the
/// certified truncation error for causal-linear models).
/// Throws CertificationError when the truncation cannot be certified.
[[nodiscard]] std::vector<double> sample_path(const InnovationModel& model, IndexRange range,
                                              std::uint64_t seed);

/// Warm-up depth (number of past driver values) the sampler uses.
[[nodiscard]] std::int64_t warmup_depth(const InnovationModel& model);

/// Mixture component realized on the path with this seed
/// (nonergodic-scale only).
[[nodiscard]] std::size_t realized_component(const NonergodicScaleModel& model,
                                             std::uint64_t seed);

/// || g(Y_0) - E(g(Y_0) | first n binary digits) ||_2 by dyadic-cell
/// averaging: the within-cell variance integrated over (0, 1). Throws
/// CertificationError when two quadrature refinements disagree. Nodes inside
/// a cell of width 2^{-n} are resolved to double spacing only, so the
/// relative accuracy is about 2^{n} * 1e-16 (absolute error stays < 1e-15).
[[nodiscard]] double bernoulli_dyadic_projection_norm(const maps::CatalogMap& g, int n,
                                                      int quadrature_points);

}  // namespace lpclt::innovations
