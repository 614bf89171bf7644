#include "lpclt/numeric.hpp"

#include <array>

#include <boost/math/quadrature/gauss.hpp>

namespace lpclt {

namespace {

constexpr int kOrder = 20;

struct ExpandedRule {
  std::array<double, kOrder> nodes{};
  std::array<double, kOrder> weights{};
  ExpandedRule() {
    using Rule = boost::math::quadrature::gauss<double, kOrder>;
    const auto& x = Rule::abscissa();
    const auto& w = Rule::weights();
    // Boost stores the nonnegative abscissae; an even order has no zero node.
    std::size_t k = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      nodes[k] = -x[i];
      weights[k] = w[i];
      ++k;
      nodes[k] = x[i];
      weights[k] = w[i];
      ++k;
    }
  }
};

const ExpandedRule& rule() {
  static const ExpandedRule r;
  return r;
}

}  // namespace

double compensated_sum(std::span<const double> xs) noexcept {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

double sum_of_squares(std::span<const double> xs) noexcept {
  CompensatedSum s;
  for (double x : xs) s.add(x * x);
  return s.value();
}

GaussRule gauss_legendre_rule() {
  const auto& r = rule();
  return {std::span<const double>(r.nodes), std::span<const double>(r.weights)};
}

double gauss_legendre(const std::function<double(double)>& f, double a,
                      double b) {
  const auto& r = rule();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  CompensatedSum s;
  for (int i = 0; i < kOrder; ++i) {
    s.add(r.weights[i] * f(mid + half * r.nodes[i]));
  }
  return half * s.value();
}

double gauss_legendre_composite(const std::function<double(double)>& f,
                                double a, double b, int panels) {
  if (panels < 1) throw PreconditionError("gauss_legendre_composite: panels < 1");
  const double h = (b - a) / panels;
  CompensatedSum s;
  for (int p = 0; p < panels; ++p) {
    s.add(gauss_legendre(f, a + p * h, a + (p + 1) * h));
  }
  return s.value();
}

}  // namespace lpclt
