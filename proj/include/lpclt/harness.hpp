#pragma once

// Monte Carlo side of the CLT: S_n = sum_j b_{n,j} xi_j over the certified
// support, replicated with split seeds, compared against a normal or
// normal-mixture target by the Kolmogorov-Smirnov distance.

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "lpclt/innovations.hpp"
#include "lpclt/weights.hpp"

namespace lpclt::harness {

/// Runs fn(i) for i in [0, count) on up to `workers` threads. Each index is
/// handled exactly once; the first failing index (lowest) is rethrown.
void parallel_for(std::int64_t count, int workers, const std::function<void(std::int64_t)>& fn);

struct MixtureComponent {
  double weight = 1.0;
  double variance = 1.0;
};

/// Law of sqrt(eta) N with eta finitely supported.
class MixtureCdf {
 public:
  explicit MixtureCdf(std::vector<MixtureComponent> components);
  [[nodiscard]] double operator()(double x) const;
  [[nodiscard]] const std::vector<MixtureComponent>& components() const noexcept {
    return components_;
  }
  [[nodiscard]] double variance() const noexcept;

 private:
  std::vector<MixtureComponent> components_;
};

/// Throws PreconditionError unless weights are positive and sum to 1 within
/// 1e-12 and every variance is positive.
[[nodiscard]] MixtureCdf mixture_cdf(std::vector<MixtureComponent> components);

/// A plain normal(variance) target is a one-component mixture.
using Target = MixtureCdf;

struct SimulationConfig {
  innovations::InnovationModel model = innovations::InnovationModel::iid();
  weights::WeightSequence weights = weights::WeightSequence::partial_sum_delta();
  std::int64_t n = 1;
  std::int64_t replicates = 2000;
  std::uint64_t master_seed = 1;
  double rel_tail_tol = 1e-3;
  Target target = mixture_cdf({{1.0, 1.0}});
  double ks_threshold = 0.05;
  int workers = 1;
};

struct CltReport {
  std::int64_t n = 0;
  std::int64_t replicates = 0;
  double empirical_mean = 0.0;
  double empirical_variance = 0.0;
  double ks_distance = 0.0;
  double ks_threshold = 0.0;
  std::vector<MixtureComponent> target;
  bool pass = false;
  std::int64_t runtime_ms = 0;
};

/// sum_j b_{n,j} xi_j on a path sampled over the stored support.
[[nodiscard]] double simulate_Sn(const innovations::InnovationModel& model,
                                 const weights::WindowCoefficients& w, std::uint64_t seed);
[[nodiscard]] double simulate_Sn(const innovations::InnovationModel& model,
                                 const weights::WeightSequence& a, std::int64_t n,
                                 std::uint64_t seed, double rel_tail_tol);

/// S_n / b_n for replicates 0..R-1 (seed split_seed(master, r)), in
/// replicate order regardless of the worker count. b_n^2 is the stored
/// squared mass of the window.
[[nodiscard]] std::vector<double> replicate_values(const SimulationConfig& config);

/// Two-sided D = max_i max(i/m - F(x_(i)), F(x_(i)) - (i-1)/m); sorts a copy.
[[nodiscard]] double ks_distance(std::span<const double> sample,
                                 const std::function<double(double)>& cdf);

/// Asymptotic Kolmogorov critical value sqrt(-log(alpha/2)/2) / sqrt(m).
[[nodiscard]] double ks_critical_value(std::int64_t m, double alpha);

struct SampleMoments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
};
[[nodiscard]] SampleMoments sample_moments(std::span<const double> xs);

/// Report built from precomputed replicate values (no timing).
[[nodiscard]] CltReport clt_report(const SimulationConfig& config, std::span<const double> values);

[[nodiscard]] CltReport monte_carlo_clt(const SimulationConfig& config);

struct VarianceRatio {
  double ratio = 0.0;
  double ci_halfwidth = 0.0;  // 1.96 s^2 sqrt(2 / (R - 1))
};

/// Throws PreconditionError when fewer than 30 replicates are available.
[[nodiscard]] VarianceRatio variance_ratio_from(std::span<const double> values);
[[nodiscard]] VarianceRatio empirical_variance_ratio(const SimulationConfig& config);

/// (1/b_n^2) sum_j b_{n,j}^2 xi_j^2 over the stored support.
[[nodiscard]] double weighted_square_functional(const weights::WindowCoefficients& w,
                                                std::span<const double> path);
[[nodiscard]] double weighted_square_functional(const innovations::InnovationModel& model,
                                                const weights::WeightSequence& a,
                                                std::int64_t n, std::uint64_t seed,
                                                double rel_tail_tol);

/// Long-run variance for ergodic models; for the scale mixture, the
/// components (p_i, v_i^2 * base). Throws CertificationError when the
/// long-run variance is not certified finite.
[[nodiscard]] Target default_target(const innovations::InnovationModel& model);

}  // namespace lpclt::harness
