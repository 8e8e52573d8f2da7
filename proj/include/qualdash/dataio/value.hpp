#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "qualdash/mss/config.hpp"

namespace qualdash::dataio {

/// Calendar date at day precision.
using Date = std::chrono::sys_days;

struct Missing {
    friend bool operator==(Missing, Missing) { return true; }
};

/// One cell. Missing is the default state.
using Value = std::variant<Missing, std::string, double, Date, bool>;

inline bool is_missing(const Value& v) { return std::holds_alternative<Missing>(v); }

/// Accepts ISO-8601 dates (`2019-01-28`, optionally followed by a time part),
/// `DD/MM/YYYY`, `DD-Mon-YYYY` and integer epoch seconds. Returns nullopt for
/// anything else, including impossible calendar days.
std::optional<Date> parse_date(std::string_view text);
std::string format_date(Date d);
Date make_date(int year, unsigned month, unsigned day);
int year_of(Date d);

/// Finite decimal number, no trailing garbage.
std::optional<double> parse_number(std::string_view text);
/// true/false, t/f, yes/no, y/n, 1/0; case-insensitive.
std::optional<bool> parse_bool(std::string_view text);
/// Empty cells and the usual NA spellings.
bool is_missing_token(std::string_view text);

/// Shortest round-trip decimal form.
std::string format_number(double d);

/// Canonical text of a cell: the form written to CSV. Missing is "".
std::string value_text(const Value& v);

/// Filter equality between a cell and a configuration literal. Same-kind
/// values compare directly; otherwise the canonical texts are compared
/// (dates parse the literal first). Missing never matches.
bool matches_literal(const Value& v, const mss::Literal& lit);

std::string_view trim(std::string_view s);

}  // namespace qualdash::dataio
