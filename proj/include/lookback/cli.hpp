#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "lookback/estimators.hpp"
#include "lookback/stirling.hpp"

namespace lookback::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitVerifyFailed = 2;

/// Environment variable holding the default numeric mode (exact|log).
inline constexpr const char* kModeEnv = "LOOKBACK_MODE";

/// Runs one CLI invocation; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Canonical report encoding: sorted keys, exact values as "p/q" strings
/// unless decimal_digits >= 0.
nlohmann::json report_to_json(const MomentReport& report, int decimal_digits = -1);
nlohmann::json triangle_to_json(const StirlingTriangle& tri, int decimal_digits = -1);

}  // namespace lookback::cli
