#pragma once

// Closed catalog of square-integrable maps g on (0, 1) used by the
// Bernoulli-shift innovations xi_n = g(Y_n) - int g.

#include <optional>
#include <string>
#include <vector>

namespace lpclt::maps {

enum class MapKind {
  kLinear,         // x - 1/2
  kSquare,         // x^2
  kHalfIndicator,  // 1{x < 1/2} - 1/2
  kOscillating,    // x^{-p} [1 + log(2/x)]^{-a} sin(1/x)
};

class CatalogMap {
 public:
  static CatalogMap linear();
  static CatalogMap square();
  static CatalogMap half_indicator();
  /// Square integrable iff p < 1/2, or p = 1/2 and a > 1/2.
  static CatalogMap oscillating(double p, double a);

  [[nodiscard]] double operator()(double x) const;
  [[nodiscard]] MapKind kind() const noexcept { return kind_; }
  [[nodiscard]] double p() const noexcept { return p_; }
  [[nodiscard]] double a() const noexcept { return a_; }

  /// Short catalog key ("linear", "square", "half-indicator", "oscillating").
  [[nodiscard]] std::string name() const;
  /// Human-readable formula.
  [[nodiscard]] std::string expression() const;

  /// int_0^1 g(x) dx.
  [[nodiscard]] double mean() const noexcept { return mean_; }
  /// int_0^1 g(x)^2 dx - mean^2.
  [[nodiscard]] double variance() const noexcept { return variance_; }

  /// Lipschitz constant on (0, 1) when one exists.
  [[nodiscard]] std::optional<double> lipschitz() const noexcept;

  /// Number of leading binary digits that determine g, when finite.
  [[nodiscard]] std::optional<int> digit_measurable() const noexcept;

  /// Points where g jumps (quadrature breakpoints).
  [[nodiscard]] std::vector<double> breakpoints() const;

  /// |g(x)| <= envelope(x) = x^{-p}[1 + log(2/x)]^{-a} (oscillating map only).
  [[nodiscard]] double envelope(double x) const;

 private:
  CatalogMap(MapKind k, double p, double a);
  MapKind kind_;
  double p_ = 0.0;
  double a_ = 0.0;
  double mean_ = 0.0;
  double variance_ = 0.0;
};

/// int_0^1 x^{-p} [1 + log(2/x)]^{-a} sin(1/x) dx (and its square moment);
/// exposed for tests.
[[nodiscard]] double oscillating_mean(double p, double a);
[[nodiscard]] double oscillating_second_moment(double p, double a);

}  // namespace lpclt::maps
