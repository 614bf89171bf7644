#include "lpclt/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include <fftw3.h>

#include "lpclt/numeric.hpp"
#include "lpclt/random.hpp"

namespace lpclt::spectral {

namespace {

// FFTW's planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t bytes) : p(fftw_malloc(bytes)) {
    if (p == nullptr) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(p); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  void* p;
};

std::vector<double> lag_products_fft(std::span<const double> d, std::int64_t max_lag) {
  const std::size_t len = d.size();
  std::size_t n = 1;
  while (n < len + static_cast<std::size_t>(max_lag) + 1) n <<= 1;
  FftwBuffer in(sizeof(double) * n);
  FftwBuffer out(sizeof(fftw_complex) * (n / 2 + 1));
  auto* x = static_cast<double*>(in.p);
  auto* y = static_cast<fftw_complex*>(out.p);
  fftw_plan fwd;
  fftw_plan inv;
  {
    std::lock_guard lock(planner_mutex());
    fwd = fftw_plan_dft_r2c_1d(static_cast<int>(n), x, y, FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_1d(static_cast<int>(n), y, x, FFTW_ESTIMATE);
  }
  std::copy(d.begin(), d.end(), x);
  std::fill(x + len, x + n, 0.0);
  fftw_execute(fwd);
  for (std::size_t i = 0; i < n / 2 + 1; ++i) {
    y[i][0] = y[i][0] * y[i][0] + y[i][1] * y[i][1];
    y[i][1] = 0.0;
  }
  fftw_execute(inv);
  std::vector<double> w(static_cast<std::size_t>(max_lag) + 1);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t m = 0; m < w.size(); ++m) w[m] = x[m] * scale;
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
  }
  // The zero lag is cheap to get exactly.
  w[0] = sum_of_squares(d);
  return w;
}

}  // namespace

double AutocovarianceFunction::at(std::int64_t k) const {
  k = k < 0 ? -k : k;
  if (k <= k_max()) return values[static_cast<std::size_t>(k)];
  if (closed_form) return closed_form(k);
  if (zero_beyond >= 0 && k > zero_beyond) return 0.0;
  if (std::isfinite(tail_bound)) return 0.0;
  std::ostringstream s;
  s << "lag " << k << " exceeds k_max = " << k_max() << " and the covariance tail is not certified";
  throw PreconditionError(s.str());
}

bool AutocovarianceFunction::extends_beyond_kmax() const noexcept {
  return static_cast<bool>(closed_form) || zero_beyond >= 0 || std::isfinite(tail_bound);
}

std::vector<double> lag_products(std::span<const double> d, std::int64_t max_lag) {
  if (max_lag < 0) throw PreconditionError("lag_products: negative lag");
  const auto len = static_cast<std::int64_t>(d.size());
  max_lag = std::min(max_lag, std::max<std::int64_t>(len - 1, 0));
  if (len == 0) return {0.0};
  if (len <= 512 || (max_lag + 1) * len <= 4'000'000) {
    std::vector<double> w(static_cast<std::size_t>(max_lag) + 1);
    for (std::int64_t m = 0; m <= max_lag; ++m) {
      CompensatedSum s;
      for (std::int64_t j = 0; j + m < len; ++j) {
        s.add(d[static_cast<std::size_t>(j)] * d[static_cast<std::size_t>(j + m)]);
      }
      w[static_cast<std::size_t>(m)] = s.value();
    }
    return w;
  }
  return lag_products_fft(d, max_lag);
}

AutocovarianceFunction autocov_causal_linear(const innovations::CausalCoefficients& u,
                                             std::int64_t k_max) {
  using namespace innovations;
  if (k_max < 0) throw PreconditionError("autocov_causal_linear: k_max must be >= 0");
  AutocovarianceFunction g;
  if (auto* geo = std::get_if<GeometricCoefficients>(&u.kind())) {
    const double r = geo->ratio;
    const double c = 1.0 / (1.0 - r * r);
    g.closed_form = [r, c](std::int64_t k) {
      return std::pow(r, static_cast<double>(k < 0 ? -k : k)) * c;
    };
    g.values.resize(static_cast<std::size_t>(k_max) + 1);
    for (std::int64_t k = 0; k <= k_max; ++k) g.values[static_cast<std::size_t>(k)] = g.closed_form(k);
    g.tail_bound = std::pow(r, static_cast<double>(k_max + 1)) * c / (1.0 - r);
    return g;
  }
  if (auto* t = std::get_if<TableCoefficients>(&u.kind())) {
    const auto last = static_cast<std::int64_t>(t->values.size()) - 1;
    std::vector<double> all = lag_products(t->values, last);
    g.zero_beyond = last;
    g.values.assign(all.begin(), all.begin() + std::min(k_max, last) + 1);
    g.values.resize(static_cast<std::size_t>(k_max) + 1, 0.0);
    CompensatedSum tail;
    for (std::int64_t k = k_max + 1; k <= last; ++k) tail.add(std::fabs(all[static_cast<std::size_t>(k)]));
    g.tail_bound = tail.value();
    return g;
  }
  const auto& c = *std::get<Prop3Coefficients>(u.kind());
  const std::int64_t len = c.materialized_length();
  if (k_max >= len) {
    std::ostringstream s;
    s << "k_max = " << k_max << " reaches past the materialized coefficients (" << len << ")";
    throw PreconditionError(s.str());
  }
  g.values = lag_products(c.u, k_max);
  g.source = AutocovSource::kTruncatedSeries;
  // Omitted inner terms pair u_i (i >= n_K) with u_j (j >= n_K - k).
  const double b = c.unmaterialized_sq_bound();
  const double reach = u.sq_sum_from(len - k_max).upper;
  g.value_error = std::sqrt(b) * std::sqrt(reach);
  g.tail_bound = kInf;
  return g;
}

AutocovarianceFunction autocovariance(const innovations::InnovationModel& model,
                                      std::int64_t k_max) {
  using namespace innovations;
  if (k_max < 0) throw PreconditionError("autocovariance: k_max must be >= 0");
  const auto& kind = model.kind();
  if (auto* c = std::get_if<CausalLinearModel>(&kind)) return autocov_causal_linear(c->u, k_max);

  AutocovarianceFunction g;
  if (auto* b = std::get_if<BernoulliShiftModel>(&kind)) {
    switch (b->map.kind()) {
      case maps::MapKind::kLinear:
        g.closed_form = [](std::int64_t k) {
          return std::ldexp(1.0, -static_cast<int>(std::min<std::int64_t>(std::llabs(k), 2000))) / 12.0;
        };
        g.tail_bound = std::ldexp(1.0, -static_cast<int>(std::min<std::int64_t>(k_max, 2000))) / 12.0;
        break;
      case maps::MapKind::kSquare:
        g.closed_form = [](std::int64_t k) {
          const double c = std::ldexp(1.0, -static_cast<int>(std::min<std::int64_t>(std::llabs(k), 2000)));
          return c * (1.0 - c) / 12.0 + c * c * 4.0 / 45.0;
        };
        {
          const double c = std::ldexp(1.0, -static_cast<int>(std::min<std::int64_t>(k_max, 2000)));
          g.tail_bound = c / 12.0 + c * c * 4.0 / 135.0;
        }
        break;
      case maps::MapKind::kHalfIndicator:
        g.zero_beyond = 0;
        g.closed_form = [](std::int64_t k) { return k == 0 ? 0.25 : 0.0; };
        break;
      case maps::MapKind::kOscillating:
        throw CertificationError("no closed-form autocovariance for the oscillating map");
    }
  } else {
    // iid, mds-product and the scale mixture are uncorrelated.
    const double v = model.second_moment();
    g.zero_beyond = 0;
    g.closed_form = [v](std::int64_t k) { return k == 0 ? v : 0.0; };
  }
  g.values.resize(static_cast<std::size_t>(k_max) + 1);
  for (std::int64_t k = 0; k <= k_max; ++k) g.values[static_cast<std::size_t>(k)] = g.closed_form(k);
  return g;
}

LongRunVariance long_run_variance(const AutocovarianceFunction& g) {
  LongRunVariance r;
  CompensatedSum s;
  s.add(g.values.at(0));
  std::int64_t next = 1;
  for (std::int64_t k = 1; k <= g.k_max(); ++k) {
    s.add(2.0 * g.values[static_cast<std::size_t>(k)]);
    if (k == next || k == g.k_max()) {
      r.partial_sums.emplace_back(k, s.value());
      if (k == next) next *= 2;
    }
  }
  r.value = s.value();
  if (!std::isfinite(g.tail_bound)) {
    r.status = LongRunVariance::Status::kPossiblyUnbounded;
    r.error_bound = kInf;
    return r;
  }
  r.error_bound = 2.0 * g.tail_bound + static_cast<double>(2 * g.k_max() + 1) * g.value_error;
  return r;
}

double spectral_density(const AutocovarianceFunction& g, double lambda) {
  CompensatedSum s;
  s.add(g.values.at(0));
  for (std::int64_t k = 1; k <= g.k_max(); ++k) {
    s.add(2.0 * g.values[static_cast<std::size_t>(k)] * std::cos(static_cast<double>(k) * lambda));
  }
  return s.value() / (2.0 * std::numbers::pi);
}

double absolute_covariance_sum(const AutocovarianceFunction& g) {
  CompensatedSum s;
  s.add(std::fabs(g.values.at(0)));
  for (std::int64_t k = 1; k <= g.k_max(); ++k) s.add(2.0 * std::fabs(g.values[static_cast<std::size_t>(k)]));
  s.add(2.0 * g.tail_bound);
  return s.value();
}

double weighted_variance(const AutocovarianceFunction& g, std::span<const double> d) {
  if (d.empty()) return 0.0;
  std::int64_t lags = static_cast<std::int64_t>(d.size()) - 1;
  if (g.zero_beyond >= 0) lags = std::min(lags, g.zero_beyond);
  if (lags > g.k_max() && !g.extends_beyond_kmax()) {
    std::ostringstream s;
    s << "weighted_variance needs lag " << lags << " but k_max = " << g.k_max()
      << " and the covariance tail is not certified";
    throw PreconditionError(s.str());
  }
  // Lags past k_max without a closed form carry a certified tail; they are
  // dropped and cost at most 2 * tail_bound * sum d^2.
  if (!g.closed_form) lags = std::min(lags, g.k_max());
  const std::vector<double> w = lag_products(d, lags);
  CompensatedSum s;
  s.add(w[0] * g.at(0));
  for (std::int64_t m = 1; m < static_cast<std::int64_t>(w.size()); ++m) {
    s.add(2.0 * w[static_cast<std::size_t>(m)] * g.at(m));
  }
  return s.value();
}

std::vector<VarianceRatioPoint> variance_ratio_trace(const weights::WeightSequence& a,
                                                     const AutocovarianceFunction& g,
                                                     std::span<const std::int64_t> n_list,
                                                     double rel_tail_tol) {
  std::vector<VarianceRatioPoint> out;
  out.reserve(n_list.size());
  for (std::int64_t n : n_list) {
    const weights::WindowCoefficients w = weights::window_coefficients(a, n, rel_tail_tol);
    VarianceRatioPoint p;
    p.n = n;
    p.var_sn = weighted_variance(g, w.values);
    p.bn_sq = w.stored_sq;
    p.ratio = p.var_sn / p.bn_sq;
    out.push_back(p);
  }
  return out;
}

double smoothness_condition_A3(std::span<const double> d) {
  return weights::first_difference_ratio(d);
}

std::vector<std::pair<std::int64_t, double>> covariance_partial_sums(const AutocovarianceFunction& g) {
  std::vector<std::pair<std::int64_t, double>> out;
  CompensatedSum s;
  s.add(g.values.at(0));
  std::int64_t next = 1;
  for (std::int64_t k = 1; k <= g.k_max(); ++k) {
    s.add(g.values[static_cast<std::size_t>(k)]);
    if (k == next || k == g.k_max()) {
      out.emplace_back(k, s.value());
      if (k == next) next *= 2;
    }
  }
  return out;
}

weights::PropertySummary covariance_bound_suite(std::int64_t instances, std::uint64_t seed) {
  using innovations::InnovationModel;
  if (instances < 0) throw PreconditionError("covariance_bound_suite: instances must be >= 0");
  weights::PropertySummary out;
  out.instances = instances;
  for (std::int64_t r = 0; r < instances; ++r) {
    const CounterRng rng(split_seed(seed, static_cast<std::uint64_t>(r)), Stream::kAuxiliary);
    std::int64_t idx = 0;
    const auto len = static_cast<std::size_t>(1 + rng.bits64(idx++) % 200);
    std::vector<double> d(len);
    for (auto& v : d) v = rng.normal(idx++);
    const auto pick = rng.bits64(idx++) % 5;
    InnovationModel model = InnovationModel::iid();
    if (pick == 0) {
      model = InnovationModel::causal_linear(
          innovations::CausalCoefficients::geometric(0.05 + 0.9 * rng.uniform(idx++)));
    } else if (pick == 1) {
      std::vector<double> u(1 + rng.bits64(idx++) % 8);
      for (auto& v : u) v = rng.uniform(idx++);
      model = InnovationModel::causal_linear(innovations::CausalCoefficients::table(u));
    } else if (pick == 2) {
      model = InnovationModel::bernoulli_shift(maps::CatalogMap::linear());
    } else if (pick == 3) {
      model = InnovationModel::bernoulli_shift(maps::CatalogMap::square());
    }
    const auto g = autocovariance(model, static_cast<std::int64_t>(len) - 1);
    const double lhs = weighted_variance(g, d);
    const double rhs = absolute_covariance_sum(g) * sum_of_squares(d);
    if (rhs > 0.0) out.max_ratio = std::max(out.max_ratio, lhs / rhs);
    if (!(lhs <= rhs * (1.0 + 1e-12) + weights::kInequalitySlack)) {
      ++out.failures;
      if (out.first_failure < 0) out.first_failure = r;
    }
  }
  return out;
}

}  // namespace lpclt::spectral
