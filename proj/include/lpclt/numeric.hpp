#pragma once

// Shared numeric plumbing: error types, compensated summation, the normal
// CDF and fixed-order Gauss-Legendre panels.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

namespace lpclt {

/// Violated input contract (bad parameters, non-monotone sequences, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numeric result could not be certified (truncation, quadrature).
class CertificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }
  [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

[[nodiscard]] double compensated_sum(std::span<const double> xs) noexcept;

/// Sum of squares in compensated arithmetic.
[[nodiscard]] double sum_of_squares(std::span<const double> xs) noexcept;

/// Standard normal CDF, Phi(x) = erfc(-x / sqrt 2) / 2. The libm erfc is
/// accurate to a few ulp, well inside the 1e-10 budget the KS distances need.
[[nodiscard]] inline double normal_cdf(double x) noexcept {
  return 0.5 * std::erfc(-x * 0.70710678118654752440);
}

/// Integral of f over [a, b] using a 20-point Gauss-Legendre rule.
[[nodiscard]] double gauss_legendre(const std::function<double(double)>& f,
                                    double a, double b);

/// Composite 20-point Gauss-Legendre over `panels` equal panels.
[[nodiscard]] double gauss_legendre_composite(
    const std::function<double(double)>& f, double a, double b, int panels);

/// Nodes and weights of the 20-point rule on [-1, 1], both halves.
struct GaussRule {
  std::span<const double> nodes;
  std::span<const double> weights;
};
[[nodiscard]] GaussRule gauss_legendre_rule();

/// Floor division for signed integers.
[[nodiscard]] constexpr std::int64_t floor_div(std::int64_t a,
                                               std::int64_t b) noexcept {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace lpclt
