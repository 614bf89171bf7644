#pragma once

// JSON and CSV serialization of module results. Object keys are sorted and
// non-finite numbers are written as null, so equal inputs give equal bytes.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "lpclt/conditions.hpp"
#include "lpclt/harness.hpp"
#include "lpclt/innovations.hpp"
#include "lpclt/spectral.hpp"
#include "lpclt/weights.hpp"

namespace lpclt::cli {

using Json = nlohmann::json;

/// Finite doubles pass through, inf and nan become null.
[[nodiscard]] Json number(double x);

[[nodiscard]] Json to_json(const harness::CltReport& r);  // runtime_ms omitted
[[nodiscard]] Json to_json(const harness::VarianceRatio& v);
[[nodiscard]] Json to_json(const conditions::ConditionReport& r);
[[nodiscard]] Json to_json(const spectral::LongRunVariance& lrv);
[[nodiscard]] Json to_json(const innovations::Prop3InvariantCheck& c);
[[nodiscard]] Json to_json(const weights::PropertySummary& s);
[[nodiscard]] Json target_json(const harness::Target& t);
[[nodiscard]] Json describe(const innovations::InnovationModel& m);
[[nodiscard]] Json describe(const weights::WeightSequence& w);

/// Pretty-printed with a trailing newline.
void write_json(const std::filesystem::path& path, const Json& j);

/// Header line then one row per entry; numbers use %.17g.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace lpclt::cli
