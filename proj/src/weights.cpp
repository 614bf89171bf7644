#include "lpclt/weights.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "lpclt/numeric.hpp"
#include "lpclt/random.hpp"

namespace lpclt::weights {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

// Running sum in extended precision with Neumaier compensation.
class WideSum {
 public:
  void add(long double x) noexcept {
    const long double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  [[nodiscard]] long double value() const noexcept { return sum_ + comp_; }

 private:
  long double sum_ = 0.0L;
  long double comp_ = 0.0L;
};

// Sum of squares visiting indices by increasing |j|.
double sum_sq_by_distance(const std::vector<double>& v, std::int64_t j_lo) {
  CompensatedSum s;
  const std::int64_t j_hi = j_lo + static_cast<std::int64_t>(v.size()) - 1;
  if (v.empty()) return 0.0;
  const std::int64_t reach = std::max(std::abs(j_lo), std::abs(j_hi));
  auto visit = [&](std::int64_t j) {
    if (j >= j_lo && j <= j_hi) {
      const double b = v[static_cast<std::size_t>(j - j_lo)];
      s.add(b * b);
    }
  };
  // Skip the empty stretch when the support does not straddle 0.
  std::int64_t start = 0;
  if (j_lo > 0) start = j_lo;
  if (j_hi < 0) start = -j_hi;
  for (std::int64_t t = start; t <= reach; ++t) {
    if (t == 0) {
      visit(0);
    } else {
      visit(-t);
      visit(t);
    }
  }
  return s.value();
}

// Squared mass of b_{n,j} for j > J, for the right-infinite kinds.
struct TailMass {
  double bound;     // certified upper bound
  double estimate;  // midpoint estimate
};

TailMass geometric_tail(double rho, std::int64_t n, std::int64_t J) {
  // b_{n,j} = rho^{j+1} (1 - rho^n) / (1 - rho) for j >= 0.
  const double c = -std::expm1(static_cast<double>(n) * std::log(rho)) / (1.0 - rho);
  const double t = c * c * std::pow(rho, 2.0 * static_cast<double>(J + 2)) / (1.0 - rho * rho);
  return {t, t};
}

// F(x) = integral of (1+y)^{-beta} over [x, x+n]; dominates b_{n,j} for x = j.
double power_envelope(double beta, double n, double x) {
  const double base = x + 1.0;
  return std::pow(base, 1.0 - beta) * std::expm1((1.0 - beta) * std::log1p(n / base)) /
         (1.0 - beta);
}

// Integral of F^2 over [y, infinity).
double power_envelope_sq_integral(double beta, double n, double y) {
  auto f = [&](double x) {
    const double v = power_envelope(beta, n, x);
    return v * v;
  };
  CompensatedSum s;
  double a = y;
  for (int panel = 0; panel < 200; ++panel) {
    const double b = 2.0 * a + n + 1.0;
    s.add(gauss_legendre(f, a, b));
    a = b;
    if (a > 1e280) break;
  }
  // Beyond a, F(x) <= n (x+1)^{-beta}.
  s.add(n * n * std::pow(a + 1.0, 1.0 - 2.0 * beta) / (2.0 * beta - 1.0));
  return s.value();
}

TailMass power_tail(double beta, std::int64_t n, std::int64_t J) {
  const auto dn = static_cast<double>(n);
  return {power_envelope_sq_integral(beta, dn, static_cast<double>(J)),
          power_envelope_sq_integral(beta, dn, static_cast<double>(J + 1))};
}

WindowCoefficients finite_window(const WeightSequence& a, std::int64_t n) {
  const std::int64_t lo = a.first_index();
  const std::int64_t hi = a.last_index();
  WindowCoefficients w;
  w.n = n;
  w.j_lo = lo - n;
  w.j_hi = hi - 1;
  // prefix[m - lo + 1] = a_lo + ... + a_m
  std::vector<long double> prefix(static_cast<std::size_t>(hi - lo + 2), 0.0L);
  WideSum run;
  for (std::int64_t m = lo; m <= hi; ++m) {
    run.add(static_cast<long double>(a(m)));
    prefix[static_cast<std::size_t>(m - lo + 1)] = run.value();
  }
  auto cumulative = [&](std::int64_t m) -> long double {
    if (m < lo) return 0.0L;
    if (m > hi) return prefix.back();
    return prefix[static_cast<std::size_t>(m - lo + 1)];
  };
  w.values.reserve(static_cast<std::size_t>(w.j_hi - w.j_lo + 1));
  for (std::int64_t j = w.j_lo; j <= w.j_hi; ++j) {
    w.values.push_back(static_cast<double>(cumulative(j + n) - cumulative(j)));
  }
  w.stored_sq = sum_sq_by_distance(w.values, w.j_lo);
  w.tail_sq = 0.0;
  w.tail_bound = 0.0;
  w.bn_sq = w.stored_sq;
  return w;
}

// Streams b_{n,j} for j = -n, -n+1, ... for weights supported on [0, inf).
class RightInfiniteStream {
 public:
  RightInfiniteStream(const WeightSequence& a, std::int64_t n)
      : a_(a), n_(n), ring_(static_cast<std::size_t>(n), 0.0), j_(-n - 1) {
    // State before j = -n: lower sum covers i <= -n - 1 (empty), upper sum
    // covers i <= -1 (empty).
  }

  double next() {
    ++j_;
    // Upper sum gains a_{j+n}; lower sum gains a_j (seen n steps earlier).
    const std::int64_t up = j_ + n_;
    const double a_up = up >= 0 ? a_(up) : 0.0;
    const auto slot = static_cast<std::size_t>(((up % n_) + n_) % n_);
    const double a_low = j_ >= 0 ? ring_[slot] : 0.0;
    ring_[slot] = a_up;
    upper_.add(a_up);
    lower_.add(a_low);
    return static_cast<double>(upper_.value() - lower_.value());
  }

 private:
  const WeightSequence& a_;
  std::int64_t n_;
  std::vector<double> ring_;
  std::int64_t j_;
  WideSum upper_;
  WideSum lower_;
};

WindowCoefficients infinite_window(const WeightSequence& a, std::int64_t n,
                                   double rel_tail_tol) {
  auto tail = [&](std::int64_t J) -> TailMass {
    if (const auto* g = std::get_if<Geometric>(&a.kind())) return geometric_tail(g->ratio, n, J);
    return power_tail(std::get<PowerDecay>(a.kind()).exponent, n, J);
  };
  const std::int64_t min_J = std::holds_alternative<Geometric>(a.kind()) ? -1 : 0;

  WindowCoefficients w;
  w.n = n;
  w.j_lo = -n;
  RightInfiniteStream stream(a, n);
  std::vector<double> cumsq;  // cumsq[i] = sum of squares of values[0..i]
  CompensatedSum run;
  auto extend_to = [&](std::int64_t J) {
    while (w.j_lo + static_cast<std::int64_t>(w.values.size()) - 1 < J) {
      const double b = stream.next();
      w.values.push_back(b);
      run.add(b * b);
      cumsq.push_back(run.value());
    }
  };
  auto stored_to = [&](std::int64_t J) {
    return cumsq[static_cast<std::size_t>(J - w.j_lo)];
  };
  auto certified = [&](std::int64_t J) {
    const double s = stored_to(J);
    return s > 0.0 && tail(J).bound <= rel_tail_tol * s;
  };

  std::int64_t lower = min_J;
  std::int64_t J = std::max<std::int64_t>(n, 64);
  for (;;) {
    if (J - w.j_lo + 1 > kMaxSupport) {
      std::ostringstream msg;
      msg << "truncation not certified for weight kind '" << a.kind_name() << "' (n=" << n
          << ", rel_tail_tol=" << rel_tail_tol << "): support would exceed " << kMaxSupport
          << " entries";
      throw CertificationError(msg.str());
    }
    extend_to(J);
    if (certified(J)) break;
    lower = J;
    J *= 2;
  }
  // Smallest certified J in [lower, J]; the predicate is monotone in J.
  std::int64_t lo = std::max(lower, min_J);
  std::int64_t hi = J;
  if (lo < w.j_lo) lo = w.j_lo;
  while (lo < hi) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (certified(mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  J = hi;
  w.values.resize(static_cast<std::size_t>(J - w.j_lo + 1));
  w.values.shrink_to_fit();
  w.j_hi = J;
  const TailMass t = tail(J);
  w.stored_sq = sum_sq_by_distance(w.values, w.j_lo);
  w.tail_sq = t.estimate;
  w.bn_sq = w.stored_sq + w.tail_sq;
  w.tail_bound = t.bound / w.stored_sq;
  return w;
}

}  // namespace

WeightSequence WeightSequence::finite_support(std::int64_t offset, std::vector<double> values) {
  if (values.empty()) throw PreconditionError("finite-support weights: empty value table");
  for (double v : values) {
    if (!std::isfinite(v)) throw PreconditionError("finite-support weights: non-finite value");
  }
  return WeightSequence(FiniteSupport{offset, std::move(values)});
}

WeightSequence WeightSequence::power_decay(double exponent) {
  if (!(exponent > 0.5) || !std::isfinite(exponent)) {
    throw PreconditionError("power-decay weights need exponent > 1/2");
  }
  return WeightSequence(PowerDecay{exponent});
}

WeightSequence WeightSequence::geometric(double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw PreconditionError("geometric weights need 0 < ratio < 1");
  }
  return WeightSequence(Geometric{ratio});
}

WeightSequence WeightSequence::partial_sum_delta() { return WeightSequence(PartialSumDelta{}); }

double WeightSequence::operator()(std::int64_t j) const {
  return std::visit(
      Overloaded{
          [j](const FiniteSupport& f) {
            const std::int64_t i = j - f.offset;
            if (i < 0 || i >= static_cast<std::int64_t>(f.values.size())) return 0.0;
            return f.values[static_cast<std::size_t>(i)];
          },
          [j](const PowerDecay& p) {
            return j < 0 ? 0.0 : std::pow(1.0 + static_cast<double>(j), -p.exponent);
          },
          [j](const Geometric& g) {
            return j < 0 ? 0.0 : std::pow(g.ratio, static_cast<double>(j));
          },
          [j](const PartialSumDelta&) { return j == 0 ? 1.0 : 0.0; },
      },
      kind_);
}

std::string_view WeightSequence::kind_name() const noexcept {
  return std::visit(Overloaded{
                        [](const FiniteSupport&) { return std::string_view("finite-support"); },
                        [](const PowerDecay&) { return std::string_view("power-decay"); },
                        [](const Geometric&) { return std::string_view("geometric"); },
                        [](const PartialSumDelta&) { return std::string_view("partial-sum-delta"); },
                    },
                    kind_);
}

std::int64_t WeightSequence::first_index() const noexcept {
  if (const auto* f = std::get_if<FiniteSupport>(&kind_)) return f->offset;
  return 0;
}

bool WeightSequence::is_finite() const noexcept {
  return std::holds_alternative<FiniteSupport>(kind_) ||
         std::holds_alternative<PartialSumDelta>(kind_);
}

std::int64_t WeightSequence::last_index() const noexcept {
  if (const auto* f = std::get_if<FiniteSupport>(&kind_)) {
    return f->offset + static_cast<std::int64_t>(f->values.size()) - 1;
  }
  if (std::holds_alternative<PartialSumDelta>(kind_)) return 0;
  return -1;
}

double WindowCoefficients::at(std::int64_t j) const noexcept {
  if (j < j_lo || j > j_hi) return 0.0;
  return values[static_cast<std::size_t>(j - j_lo)];
}

WindowCoefficients window_coefficients(const WeightSequence& a, std::int64_t n,
                                       double rel_tail_tol) {
  if (n < 1) throw PreconditionError("window_coefficients: n must be >= 1");
  if (!(rel_tail_tol > 0.0 && rel_tail_tol < 1.0)) {
    throw PreconditionError("window_coefficients: rel_tail_tol must lie in (0, 1)");
  }
  if (a.is_finite()) return finite_window(a, n);
  return infinite_window(a, n, rel_tail_tol);
}

double first_difference_ratio(std::span<const double> d) {
  const double denom = sum_of_squares(d);
  if (!(denom > 0.0)) throw PreconditionError("first_difference_ratio: zero array");
  CompensatedSum num;
  double prev = 0.0;
  for (double x : d) {
    const double diff = x - prev;
    num.add(diff * diff);
    prev = x;
  }
  num.add(prev * prev);
  return num.value() / denom;
}

SmoothnessRatios smoothness_ratios(const WindowCoefficients& w) {
  SmoothnessRatios r;
  r.r1 = first_difference_ratio(w.values);
  const double denom = sum_of_squares(w.values);
  CompensatedSum num;
  double prev_sq = 0.0;
  for (double x : w.values) {
    const double sq = x * x;
    num.add(std::fabs(sq - prev_sq));
    prev_sq = sq;
  }
  num.add(prev_sq);
  r.r2 = num.value() / denom;
  return r;
}

std::int64_t block_of(std::int64_t j, std::int64_t p) noexcept { return floor_div(j - 1, p) + 1; }

double BlockAverages::at(std::int64_t k) const noexcept {
  const std::int64_t i = k - first_block;
  if (i < 0 || i >= static_cast<std::int64_t>(c.size())) return 0.0;
  return c[static_cast<std::size_t>(i)];
}

BlockAverages block_averages(const WindowCoefficients& w, std::int64_t p) {
  if (p < 1) throw PreconditionError("block_averages: p must be >= 1");
  const double denom = sum_of_squares(w.values);
  if (!(denom > 0.0)) throw PreconditionError("block_averages: zero window");
  BlockAverages out;
  out.p = p;
  out.first_block = block_of(w.j_lo, p);
  const std::int64_t last_block = block_of(w.j_hi, p);
  out.c.reserve(static_cast<std::size_t>(last_block - out.first_block + 1));
  CompensatedSum s1;
  CompensatedSum s2;
  for (std::int64_t k = out.first_block; k <= last_block; ++k) {
    const std::int64_t first = (k - 1) * p + 1;
    CompensatedSum block;
    for (std::int64_t j = first; j < first + p; ++j) block.add(w.at(j));
    const double c = block.value() / static_cast<double>(p);
    out.c.push_back(c);
    for (std::int64_t j = first; j < first + p; ++j) {
      const double b = w.at(j);
      s1.add((b - c) * (b - c));
      s2.add(std::fabs(b * b - c * c));
    }
  }
  out.s1 = s1.value() / denom;
  out.s2 = s2.value() / denom;
  return out;
}

WuInequality wu_inequality(std::span<const double> a, std::span<const double> psi) {
  if (a.size() != psi.size()) throw PreconditionError("wu_inequality: length mismatch");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i] >= 0.0) || !(psi[i] >= 0.0)) {
      throw PreconditionError("wu_inequality: sequences must be nonnegative");
    }
    if (i > 0 && psi[i] > psi[i - 1]) {
      std::ostringstream msg;
      msg << "wu_inequality: psi is not nonincreasing at n=" << i + 1;
      throw PreconditionError(msg.str());
    }
  }
  const std::size_t N = a.size();
  // suffix[i] = sum_{k >= i} a_k^2, accumulated from the far end.
  std::vector<double> suffix(N + 1, 0.0);
  CompensatedSum tail;
  for (std::size_t i = N; i-- > 0;) {
    tail.add(a[i] * a[i]);
    suffix[i] = tail.value();
  }
  CompensatedSum lhs;
  CompensatedSum rhs;
  for (std::size_t i = 0; i < N; ++i) {
    lhs.add(a[i] * psi[i]);
    rhs.add(psi[i] * std::sqrt(suffix[i] / static_cast<double>(i + 1)));
  }
  WuInequality out;
  out.lhs = lhs.value();
  out.rhs = 3.0 * rhs.value();
  out.holds = out.lhs <= out.rhs + kInequalitySlack;
  return out;
}

PropertySummary wu_property_suite(std::int64_t instances, std::uint64_t seed) {
  if (instances < 0) throw PreconditionError("wu_property_suite: instances must be >= 0");
  PropertySummary out;
  out.instances = instances;
  for (std::int64_t r = 0; r < instances; ++r) {
    const CounterRng rng(split_seed(seed, static_cast<std::uint64_t>(r)), Stream::kAuxiliary);
    std::int64_t idx = 0;
    const auto N = static_cast<std::size_t>(1 + (rng.bits64(idx++) % 256));
    const auto shape = rng.bits64(idx++) % 3;
    std::vector<double> a(N);
    std::vector<double> psi(N);
    for (std::size_t i = 0; i < N; ++i) {
      const double u = rng.uniform(idx++);
      switch (shape) {
        case 0:
          a[i] = u;
          break;
        case 1:
          a[i] = u < 0.1 ? 10.0 * u : 0.0;
          break;
        default:
          a[i] = std::pow(u, -0.4) - 1.0;
          break;
      }
    }
    if (rng.bit(idx++)) {
      for (auto& v : psi) v = rng.uniform(idx++);
      std::sort(psi.begin(), psi.end(), std::greater<>());
    } else {
      const double e = 2.0 * rng.uniform(idx++);
      for (std::size_t i = 0; i < N; ++i) psi[i] = std::pow(static_cast<double>(i + 1), -e);
    }
    const WuInequality w = wu_inequality(a, psi);
    if (w.rhs > 0.0) out.max_ratio = std::max(out.max_ratio, w.lhs / w.rhs);
    if (!w.holds) {
      ++out.failures;
      if (out.first_failure < 0) out.first_failure = r;
    }
  }
  return out;
}

}  // namespace lpclt::weights
