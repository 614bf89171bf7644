#include "lpclt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "lpclt/numeric.hpp"
#include "lpclt/random.hpp"
#include "lpclt/spectral.hpp"

namespace lpclt::harness {

void parallel_for(std::int64_t count, int workers, const std::function<void(std::int64_t)>& fn) {
  if (count <= 0) return;
  if (workers < 1) throw PreconditionError("parallel_for: workers must be >= 1");
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  std::atomic<std::int64_t> next{0};
  auto work = [&] {
    for (std::int64_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  const auto threads = static_cast<std::int64_t>(std::min<std::int64_t>(workers, count));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (std::int64_t t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  for (std::int64_t i = 0; i < count; ++i) {
    if (auto e = errors[static_cast<std::size_t>(i)]) {
      try {
        std::rethrow_exception(e);
      } catch (const CertificationError& ex) {
        std::ostringstream s;
        s << "replicate " << i << " failed: " << ex.what();
        throw CertificationError(s.str());
      } catch (const PreconditionError& ex) {
        std::ostringstream s;
        s << "replicate " << i << " failed: " << ex.what();
        throw PreconditionError(s.str());
      }
    }
  }
}

// ---------------------------------------------------------------------------

MixtureCdf::MixtureCdf(std::vector<MixtureComponent> components)
    : components_(std::move(components)) {}

double MixtureCdf::operator()(double x) const {
  double s = 0.0;
  for (const auto& c : components_) s += c.weight * normal_cdf(x / std::sqrt(c.variance));
  return s;
}

double MixtureCdf::variance() const noexcept {
  double s = 0.0;
  for (const auto& c : components_) s += c.weight * c.variance;
  return s;
}

MixtureCdf mixture_cdf(std::vector<MixtureComponent> components) {
  if (components.empty()) throw PreconditionError("mixture needs at least one component");
  double total = 0.0;
  for (const auto& c : components) {
    if (!(c.weight > 0.0) || !(c.variance > 0.0) || !std::isfinite(c.variance)) {
      throw PreconditionError("mixture components need weight > 0 and variance > 0");
    }
    total += c.weight;
  }
  if (std::fabs(total - 1.0) > 1e-12) throw PreconditionError("mixture weights must sum to 1");
  return MixtureCdf(std::move(components));
}

// ---------------------------------------------------------------------------

double simulate_Sn(const innovations::InnovationModel& model, const weights::WindowCoefficients& w,
                   std::uint64_t seed) {
  const auto path = innovations::sample_path(model, {w.j_lo, w.j_hi}, seed);
  CompensatedSum s;
  for (std::size_t i = 0; i < path.size(); ++i) s.add(w.values[i] * path[i]);
  return s.value();
}

double simulate_Sn(const innovations::InnovationModel& model, const weights::WeightSequence& a,
                   std::int64_t n, std::uint64_t seed, double rel_tail_tol) {
  return simulate_Sn(model, weights::window_coefficients(a, n, rel_tail_tol), seed);
}

std::vector<double> replicate_values(const SimulationConfig& config) {
  if (config.replicates < 1) throw PreconditionError("replicates must be >= 1");
  const auto w = weights::window_coefficients(config.weights, config.n, config.rel_tail_tol);
  const double bn = std::sqrt(w.stored_sq);
  std::vector<double> out(static_cast<std::size_t>(config.replicates));
  parallel_for(config.replicates, config.workers, [&](std::int64_t r) {
    const std::uint64_t seed = split_seed(config.master_seed, static_cast<std::uint64_t>(r));
    out[static_cast<std::size_t>(r)] = simulate_Sn(config.model, w, seed) / bn;
  });
  return out;
}

double ks_distance(std::span<const double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw PreconditionError("ks_distance: empty sample");
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  const auto m = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / m - f, f - static_cast<double>(i) / m});
  }
  return std::clamp(d, 0.0, 1.0);
}

double ks_critical_value(std::int64_t m, double alpha) {
  if (m < 1 || !(alpha > 0.0 && alpha < 1.0)) throw PreconditionError("ks_critical_value: bad input");
  return std::sqrt(-0.5 * std::log(0.5 * alpha)) / std::sqrt(static_cast<double>(m));
}

SampleMoments sample_moments(std::span<const double> xs) {
  if (xs.size() < 2) throw PreconditionError("sample_moments: need two values");
  SampleMoments m;
  m.mean = compensated_sum(xs) / static_cast<double>(xs.size());
  CompensatedSum s;
  for (double x : xs) s.add((x - m.mean) * (x - m.mean));
  m.variance = s.value() / static_cast<double>(xs.size() - 1);
  return m;
}

CltReport clt_report(const SimulationConfig& config, std::span<const double> values) {
  CltReport r;
  r.n = config.n;
  r.replicates = static_cast<std::int64_t>(values.size());
  const SampleMoments m = sample_moments(values);
  r.empirical_mean = m.mean;
  r.empirical_variance = m.variance;
  r.ks_distance = ks_distance(values, [&](double x) { return config.target(x); });
  r.ks_threshold = config.ks_threshold;
  r.target = config.target.components();
  r.pass = r.ks_distance < config.ks_threshold;
  return r;
}

CltReport monte_carlo_clt(const SimulationConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const auto values = replicate_values(config);
  CltReport r = clt_report(config, values);
  r.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                     std::chrono::steady_clock::now() - start)
                     .count();
  return r;
}

VarianceRatio variance_ratio_from(std::span<const double> values) {
  if (values.size() < 30) {
    throw PreconditionError("empirical_variance_ratio needs at least 30 replicates");
  }
  const SampleMoments m = sample_moments(values);
  VarianceRatio v;
  v.ratio = m.variance;
  v.ci_halfwidth = 1.96 * m.variance * std::sqrt(2.0 / static_cast<double>(values.size() - 1));
  return v;
}

VarianceRatio empirical_variance_ratio(const SimulationConfig& config) {
  if (config.replicates < 30) {
    throw PreconditionError("empirical_variance_ratio needs at least 30 replicates");
  }
  return variance_ratio_from(replicate_values(config));
}

double weighted_square_functional(const weights::WindowCoefficients& w,
                                  std::span<const double> path) {
  if (static_cast<std::int64_t>(path.size()) != w.size()) {
    throw PreconditionError("weighted_square_functional: path does not match the support");
  }
  CompensatedSum s;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const double b = w.values[i];
    s.add(b * b * path[i] * path[i]);
  }
  return s.value() / w.stored_sq;
}

double weighted_square_functional(const innovations::InnovationModel& model,
                                  const weights::WeightSequence& a, std::int64_t n,
                                  std::uint64_t seed, double rel_tail_tol) {
  const auto w = weights::window_coefficients(a, n, rel_tail_tol);
  const auto path = innovations::sample_path(model, {w.j_lo, w.j_hi}, seed);
  return weighted_square_functional(w, path);
}

Target default_target(const innovations::InnovationModel& model) {
  if (auto* ne = std::get_if<innovations::NonergodicScaleModel>(&model.kind())) {
    std::vector<MixtureComponent> c;
    for (const auto& s : ne->components) c.push_back({s.probability, s.scale * s.scale});
    return mixture_cdf(std::move(c));
  }
  std::int64_t k_max = 4096;
  if (auto* cl = std::get_if<innovations::CausalLinearModel>(&model.kind())) {
    k_max = std::min(k_max, cl->u.known_length() - 1);
  }
  const auto lrv = spectral::long_run_variance(spectral::autocovariance(model, k_max));
  if (!lrv.finite()) {
    throw CertificationError("long-run variance not certified finite (possibly unbounded spectral density)");
  }
  if (!(lrv.value > 0.0)) throw CertificationError("long-run variance is not positive");
  return mixture_cdf({{1.0, lrv.value}});
}

}  // namespace lpclt::harness
