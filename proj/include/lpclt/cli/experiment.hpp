#pragma once

// Runs one configured experiment, writes its artifacts and reports one
// pass/fail line per check.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lpclt/cli/config.hpp"
#include "lpclt/cli/report_json.hpp"

namespace lpclt::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitCertification = 3;

struct RunOptions {
  int workers = 1;
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;  // overrides the config seed
  bool write_files = true;
};

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct RunResult {
  int exit_code = kExitOk;
  std::vector<Check> checks;
  Json report;            // byte-stable content of report.json
  std::string error;      // set for exit codes 2 and 3
};

/// Never throws for config or certification problems; those map to exit
/// codes 2 and 3 with `error` set.
[[nodiscard]] RunResult run_experiment(const ExperimentConfig& config, const RunOptions& options);

/// "PASS name: detail" / "FAIL name: detail".
[[nodiscard]] std::string format_check(const Check& c);

}  // namespace lpclt::cli
