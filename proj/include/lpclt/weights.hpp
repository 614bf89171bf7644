#pragma once

// Weight sequences (a_j), the window coefficients b_{n,j} = a_{j+1} + ... +
// a_{j+n} with a certified finite support, and the sequence facts used by
// the CLT: smoothness ratios of b_{n,.}, block averages, and the weighted
// tail inequality for nonnegative sequences.

#include <cstdint>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace lpclt::weights {

struct FiniteSupport {
  std::int64_t offset = 0;     // index of values[0]
  std::vector<double> values;  // a_offset, a_{offset+1}, ...
};

/// a_j = (1 + j)^(-exponent) for j >= 0; requires exponent > 1/2.
struct PowerDecay {
  double exponent = 0.75;
};

/// a_j = ratio^j for j >= 0; requires 0 < ratio < 1.
struct Geometric {
  double ratio = 0.5;
};

/// a_0 = 1: S_n is the plain partial sum of the innovations.
struct PartialSumDelta {};

class WeightSequence {
 public:
  using Kind = std::variant<FiniteSupport, PowerDecay, Geometric, PartialSumDelta>;

  static WeightSequence finite_support(std::int64_t offset, std::vector<double> values);
  static WeightSequence power_decay(double exponent);
  static WeightSequence geometric(double ratio);
  static WeightSequence partial_sum_delta();

  /// a_j; exactly zero off the declared support.
  [[nodiscard]] double operator()(std::int64_t j) const;

  [[nodiscard]] std::string_view kind_name() const noexcept;
  [[nodiscard]] const Kind& kind() const noexcept { return kind_; }

  /// Smallest index that can carry a nonzero weight.
  [[nodiscard]] std::int64_t first_index() const noexcept;
  /// Largest such index, or -1 together with is_finite() == false.
  [[nodiscard]] bool is_finite() const noexcept;
  [[nodiscard]] std::int64_t last_index() const noexcept;

 private:
  explicit WeightSequence(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

/// b_{n,j} over a certified support [j_lo, j_hi].
struct WindowCoefficients {
  std::int64_t n = 0;
  std::int64_t j_lo = 0;
  std::int64_t j_hi = -1;
  std::vector<double> values;  // values[i] = b_{n, j_lo + i}
  double stored_sq = 0.0;      // sum of stored squares
  double tail_sq = 0.0;        // estimate of the omitted squared mass
  double bn_sq = 0.0;          // stored_sq + tail_sq
  double tail_bound = 0.0;     // certified bound on omitted mass / stored_sq

  /// b_{n,j}, zero outside the stored support.
  [[nodiscard]] double at(std::int64_t j) const noexcept;
  [[nodiscard]] std::int64_t size() const noexcept {
    return static_cast<std::int64_t>(values.size());
  }
};

/// Largest support the search is allowed to materialize.
inline constexpr std::int64_t kMaxSupport = std::int64_t{1} << 26;

/// Throws CertificationError ("truncation not certified ...") when the
/// omitted relative mass cannot be pushed below rel_tail_tol inside
/// kMaxSupport entries.
[[nodiscard]] WindowCoefficients window_coefficients(const WeightSequence& a,
                                                     std::int64_t n,
                                                     double rel_tail_tol);

/// (sum_j |d_j - d_{j-1}|^2) / (sum_j d_j^2) for d extended by zeros on both
/// sides. Shared by the smoothness ratios here and by the spectral module.
[[nodiscard]] double first_difference_ratio(std::span<const double> d);

struct SmoothnessRatios {
  double r1 = 0.0;  // squared first differences over b_n^2
  double r2 = 0.0;  // |b_j^2 - b_{j-1}^2| summed over b_n^2
};

/// Both ratios are evaluated on the stored support.
[[nodiscard]] SmoothnessRatios smoothness_ratios(const WindowCoefficients& w);

/// Blocks I_k = {(k-1)p + 1, ..., kp}, k in Z.
struct BlockAverages {
  std::int64_t p = 1;
  std::int64_t first_block = 0;
  std::vector<double> c;  // c[i] = c_{n, first_block + i}
  double s1 = 0.0;
  double s2 = 0.0;

  [[nodiscard]] double at(std::int64_t k) const noexcept;
};

/// Index of the block containing j.
[[nodiscard]] std::int64_t block_of(std::int64_t j, std::int64_t p) noexcept;

[[nodiscard]] BlockAverages block_averages(const WindowCoefficients& w, std::int64_t p);

struct WuInequality {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// lhs = sum a_n psi_n, rhs = 3 sum n^{-1/2} psi_n (sum_{k>=n} a_k^2)^{1/2}
/// for sequences given on n = 1..N (element 0 is n = 1). psi must be
/// nonincreasing and both sequences nonnegative.
[[nodiscard]] WuInequality wu_inequality(std::span<const double> a,
                                         std::span<const double> psi);

struct PropertySummary {
  std::int64_t instances = 0;
  std::int64_t failures = 0;
  double max_ratio = 0.0;         // largest lhs / rhs seen
  std::int64_t first_failure = -1;
};

/// wu_inequality on seeded random (a, psi) tables: lengths 1..256, a drawn
/// dense, sparse or heavy-tailed, psi a sorted uniform or power profile.
[[nodiscard]] PropertySummary wu_property_suite(std::int64_t instances, std::uint64_t seed);

/// Absolute slack used by inequality checks.
inline constexpr double kInequalitySlack = 1e-9;

}  // namespace lpclt::weights
