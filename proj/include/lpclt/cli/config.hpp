#pragma once

// Experiment configuration: JSON in, validated typed object out. Unknown
// fields and type mismatches fail with "<source>:<line>: <field>: <reason>".

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lpclt/conditions.hpp"
#include "lpclt/harness.hpp"
#include "lpclt/innovations.hpp"
#include "lpclt/weights.hpp"

namespace lpclt::cli {

inline constexpr int kSchemaVersion = 1;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { kClt, kVarianceTrace, kConditions, kCounterexample, kLemmas };

[[nodiscard]] std::string_view to_string(ExperimentKind k) noexcept;

struct AlternativeTarget {
  harness::Target target = harness::mixture_cdf({{1.0, 1.0}});
  double min_ks = 0.05;
};

struct MixingaleSpec {
  conditions::QuantileFunction q = conditions::QuantileFunction::constant(1.0);
  conditions::AlphaSequence alpha = conditions::AlphaSequence::zero();
  std::int64_t k_cap = 1000;
  std::string family = "alpha-bar";
  std::optional<std::string> expect;
};

struct MomentFormSpec {
  double t = 4.0;
  conditions::AlphaSequence alpha = conditions::AlphaSequence::zero();
  std::int64_t k_cap = 1000;
  std::optional<std::string> expect;
};

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  ExperimentKind kind = ExperimentKind::kClt;
  std::optional<innovations::InnovationModel> model;
  std::optional<weights::WeightSequence> weights;
  std::vector<std::int64_t> n;
  std::int64_t replicates = 2000;
  std::uint64_t seed = 1;

  double rel_tail_tol = 1e-3;
  double ks_threshold = 0.05;
  std::optional<double> variance_rel_tol;  // clt: |ratio - target| check
  std::optional<double> ratio_rel_tol;     // analytic Var(S_n)/b_n^2 vs target

  std::optional<harness::Target> target;  // empty: derived from the model
  std::vector<AlternativeTarget> alternatives;

  // counterexample
  std::optional<innovations::NullSequence> psi;
  std::int64_t cutoff = 1'000'000;

  // conditions
  std::map<std::string, std::string> expect;  // condition id -> verdict
  double integral_t = 2.0;
  int shells = 24;
  int functional_n_cap = 40;
  std::int64_t series_cap = 4096;
  std::optional<MixingaleSpec> mixingale;
  std::vector<MomentFormSpec> moment_form;

  // lemmas
  std::int64_t block_size = 8;
  std::int64_t property_instances = 100;
  double trend_max = 0.02;

  // outputs (relative to the output directory)
  std::string report = "report.json";
  std::string metadata = "metadata.json";
  std::string trace_csv = "trace.csv";
  std::string values_csv;  // empty: not written
};

/// Throws ConfigError.
[[nodiscard]] ExperimentConfig parse_config(std::string_view text, std::string_view source);
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path);

/// Model, weight and map catalogs with parameter schemas.
[[nodiscard]] std::string model_catalog();

}  // namespace lpclt::cli
