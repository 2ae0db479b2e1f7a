#pragma once

#include <string>
#include <vector>

#include "framedisc/io.hpp"

namespace framedisc {

enum ExitCode : int {
  kExitOk = 0,
  kExitPropertyFails = 1,
  kExitConfigError = 2,
  kExitCertificationRefusal = 3,
  kExitNumericalFailure = 4,
};

inline constexpr const char* kSchemaVersion = "1";

// Every recognised key with its default value.  Keys are kebab-case and
// double as command-line flag names.
Json default_config();

// Overlays `overrides` on `base`; unknown keys raise ConfigError.
Json merge_config(Json base, const Json& overrides);

// Parses a command-line value: JSON when it parses, otherwise a string.
Json parse_flag_value(const std::string& text);

struct RunResult {
  int exit_code = kExitOk;
  Json report;
};

// The commands take a complete configuration (defaults merged) and never
// throw; failures are mapped to exit codes and described in the report.
RunResult cmd_validate(const Json& config);
RunResult cmd_osc(const Json& config);
RunResult cmd_discretize(const Json& config);
RunResult run_command(const std::string& command, const Json& config);

// One CSV row per report with the headline constants.
std::string report_merge(const std::vector<Json>& reports, const std::vector<std::string>& names);

}  // namespace framedisc
