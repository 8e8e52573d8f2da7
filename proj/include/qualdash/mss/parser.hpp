#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "qualdash/mss/config.hpp"
#include "qualdash/mss/error.hpp"
#include "qualdash/mss/validate.hpp"

namespace qualdash::mss {

/// Parses a configuration document. Unknown keys are reported through
/// `warnings` (when given) and otherwise ignored.
///
/// Throws ConfigError with code SyntaxError (message carries the byte
/// offset), DuplicateKey, DuplicateMetric, MalformedRule,
/// MalformedGranularity, MalformedValue or MissingKey.
DashboardConfig parse_config(std::string_view text, std::vector<Diagnostic>* warnings = nullptr);

/// Pretty-printed JSON; keys the config does not carry are omitted.
std::string serialize_config(const DashboardConfig& config);

}  // namespace qualdash::mss
