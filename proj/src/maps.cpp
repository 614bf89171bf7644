#include "lpclt/maps.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "lpclt/numeric.hpp"

namespace lpclt::maps {

namespace {

// int_1^inf phi(t) trig(omega t) dt, panel by panel between zeros of the
// trigonometric factor. The remainder of an alternating panel series is
// taken as half of the next panel.
template <class Phi, class Trig>
double oscillatory_tail_integral(Phi phi, Trig trig, double omega, double first_zero,
                                 int panels) {
  auto f = [&](double t) { return phi(t) * trig(omega * t); };
  CompensatedSum s;
  s.add(gauss_legendre(f, 1.0, first_zero));
  const double step = std::numbers::pi / omega;
  double a = first_zero;
  for (int k = 0; k < panels; ++k) {
    s.add(gauss_legendre(f, a, a + step));
    a += step;
  }
  s.add(0.5 * gauss_legendre(f, a, a + step));
  return s.value();
}

constexpr int kOscillationPanels = 20000;

}  // namespace

double oscillating_mean(double p, double a) {
  // x = 1/t: int_1^inf t^{p-2} [1 + log(2t)]^{-a} sin t dt.
  auto phi = [p, a](double t) {
    return std::pow(t, p - 2.0) * std::pow(1.0 + std::log(2.0 * t), -a);
  };
  return oscillatory_tail_integral(phi, [](double x) { return std::sin(x); }, 1.0,
                                   std::numbers::pi, kOscillationPanels);
}

double oscillating_second_moment(double p, double a) {
  // sin^2 = (1 - cos 2t) / 2 after x = 1/t; the smooth half is integrated
  // in s = log t, where it decays like exp((2p - 1) s).
  auto smooth = [p, a](double s) {
    return std::exp((2.0 * p - 1.0) * s) * std::pow(1.0 + std::log(2.0) + s, -2.0 * a);
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  const double smooth_part = 0.5 * integrator.integrate(smooth, 0.0, std::numeric_limits<double>::infinity());
  auto phi = [p, a](double t) {
    return std::pow(t, 2.0 * p - 2.0) * std::pow(1.0 + std::log(2.0 * t), -2.0 * a);
  };
  const double osc = oscillatory_tail_integral(
      phi, [](double x) { return std::cos(x); }, 2.0, 0.75 * std::numbers::pi,
      kOscillationPanels);
  return smooth_part - 0.5 * osc;
}

CatalogMap::CatalogMap(MapKind k, double p, double a) : kind_(k), p_(p), a_(a) {
  switch (kind_) {
    case MapKind::kLinear:
      mean_ = 0.0;
      variance_ = 1.0 / 12.0;
      break;
    case MapKind::kSquare:
      mean_ = 1.0 / 3.0;
      variance_ = 1.0 / 5.0 - 1.0 / 9.0;
      break;
    case MapKind::kHalfIndicator:
      mean_ = 0.0;
      variance_ = 0.25;
      break;
    case MapKind::kOscillating:
      mean_ = oscillating_mean(p_, a_);
      variance_ = oscillating_second_moment(p_, a_) - mean_ * mean_;
      break;
  }
}

CatalogMap CatalogMap::linear() { return CatalogMap(MapKind::kLinear, 0.0, 0.0); }
CatalogMap CatalogMap::square() { return CatalogMap(MapKind::kSquare, 0.0, 0.0); }
CatalogMap CatalogMap::half_indicator() { return CatalogMap(MapKind::kHalfIndicator, 0.0, 0.0); }

CatalogMap CatalogMap::oscillating(double p, double a) {
  if (!(p >= 0.0 && p <= 0.5) || !(a >= 0.0) || !std::isfinite(a)) {
    throw PreconditionError("oscillating map needs 0 <= p <= 1/2 and a >= 0");
  }
  if (p == 0.5 && !(a > 0.5)) {
    throw PreconditionError("oscillating map with p = 1/2 is square integrable only for a > 1/2");
  }
  return CatalogMap(MapKind::kOscillating, p, a);
}

double CatalogMap::operator()(double x) const {
  switch (kind_) {
    case MapKind::kLinear:
      return x - 0.5;
    case MapKind::kSquare:
      return x * x;
    case MapKind::kHalfIndicator:
      return x < 0.5 ? 0.5 : -0.5;
    case MapKind::kOscillating:
      return envelope(x) * std::sin(1.0 / x);
  }
  return 0.0;
}

double CatalogMap::envelope(double x) const {
  if (kind_ != MapKind::kOscillating) return std::fabs((*this)(x));
  return std::pow(x, -p_) * std::pow(1.0 + std::log(2.0 / x), -a_);
}

std::string CatalogMap::name() const {
  switch (kind_) {
    case MapKind::kLinear:
      return "linear";
    case MapKind::kSquare:
      return "square";
    case MapKind::kHalfIndicator:
      return "half-indicator";
    case MapKind::kOscillating:
      return "oscillating";
  }
  return {};
}

std::string CatalogMap::expression() const {
  switch (kind_) {
    case MapKind::kLinear:
      return "x - 1/2";
    case MapKind::kSquare:
      return "x^2";
    case MapKind::kHalfIndicator:
      return "1{x<1/2} - 1/2";
    case MapKind::kOscillating: {
      std::ostringstream s;
      s << "x^{-p}[1+log(2/x)]^{-a} sin(1/x) with p=" << p_ << ", a=" << a_;
      return s.str();
    }
  }
  return {};
}

std::optional<double> CatalogMap::lipschitz() const noexcept {
  switch (kind_) {
    case MapKind::kLinear:
      return 1.0;
    case MapKind::kSquare:
      return 2.0;
    default:
      return std::nullopt;
  }
}

std::optional<int> CatalogMap::digit_measurable() const noexcept {
  if (kind_ == MapKind::kHalfIndicator) return 1;
  return std::nullopt;
}

std::vector<double> CatalogMap::breakpoints() const {
  if (kind_ == MapKind::kHalfIndicator) return {0.5};
  return {};
}

}  // namespace lpclt::maps
