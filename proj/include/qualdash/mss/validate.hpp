#pragma once

#include <string>
#include <vector>

#include "qualdash/mss/config.hpp"
#include "qualdash/mss/dictionary.hpp"

namespace qualdash::mss {

inline constexpr std::size_t kMaxMeasures = 5;
inline constexpr std::size_t kMaxRuleKinds = 2;
inline constexpr std::size_t kMaxQuantities = 5;

/// Codes reported by validate_config. Stable strings; tests and the CLI
/// match on them.
namespace codes {
inline constexpr const char* kNoMeasures = "NoMeasures";
inline constexpr const char* kTooManyMeasures = "TooManyMeasures";
inline constexpr const char* kTooManyRuleKinds = "TooManyRuleKinds";
inline constexpr const char* kTooManyQuantities = "TooManyQuantities";
inline constexpr const char* kUnknownField = "UnknownField";
inline constexpr const char* kUndeclaredMeasure = "UndeclaredMeasure";
inline constexpr const char* kMissingValueField = "MissingValueField";
inline constexpr const char* kUnexpectedValueField = "UnexpectedValueField";
inline constexpr const char* kUnpairedInterval = "UnpairedInterval";
inline constexpr const char* kIntervalRule = "IntervalRule";
inline constexpr const char* kTspanOutOfRange = "TspanOutOfRange";
inline constexpr const char* kDuplicateMetric = "DuplicateMetric";
inline constexpr const char* kEmptyName = "EmptyName";
inline constexpr const char* kNotTemporal = "NotTemporal";
inline constexpr const char* kUnknownKey = "UnknownKey";
}  // namespace codes

struct Diagnostic {
    std::string path;
    std::string code;
    std::string message;

    friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

struct ValidationReport {
    std::vector<Diagnostic> errors;
    std::vector<Diagnostic> warnings;

    bool ok() const { return errors.empty(); }

    friend bool operator==(const ValidationReport&, const ValidationReport&) = default;
};

/// Checks every structural and dictionary invariant of a config. Never
/// throws; findings are collected in document order. Field references are
/// resolved through config.field_aliases before the dictionary lookup.
ValidationReport validate_config(const DashboardConfig& config, const DataDictionary& dict);

/// `path: code: message`, one line per error then per warning (prefixed
/// with "warning: ").
std::string render_report(const ValidationReport& report);

}  // namespace qualdash::mss
