#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qualdash/dataio/table.hpp"
#include "qualdash/mss/config.hpp"

namespace qualdash::dataio {

/// How one synthetic column is produced.
///
///   id          prefix + zero-padded row number
///   date        uniform over the profile's [start, end]
///   date_after  base field + uniform [min, max] days; Missing when base is
///   category    weighted draw from values
///   number      uniform [min, max] or normal(mean, sd) clamped to [min, max],
///               rounded to `decimals`
///   boolean     true with probability p
struct ColumnGenerator {
    std::string kind = "category";
    std::string prefix;
    std::string base;
    int min_days = 0;
    int max_days = 0;
    std::vector<std::string> values;
    std::vector<double> weights;
    std::string distribution = "uniform";
    double min = 0, max = 1, mean = 0, sd = 1;
    int decimals = 2;
    double p = 0.5;

    friend bool operator==(const ColumnGenerator&, const ColumnGenerator&) = default;
};

struct SyntheticColumn {
    std::string name;
    mss::FieldType type = mss::FieldType::nominal;
    std::string description;
    ColumnGenerator generator;
    double missing = 0;   // probability the cell is Missing
    double invalid = 0;   // probability the cell holds an invalid code
    std::vector<mss::Literal> invalid_codes;

    friend bool operator==(const SyntheticColumn&, const SyntheticColumn&) = default;
};

struct SyntheticProfile {
    std::string name;
    std::string start = "2017-01-01";
    std::string end = "2019-12-31";
    std::vector<SyntheticColumn> columns;

    /// Overrides one column's missingness rate. Throws DataError for an
    /// unknown column or a rate outside [0, 1].
    void set_missing(std::string_view column, double rate);
    void set_invalid(std::string_view column, double rate);

    friend bool operator==(const SyntheticProfile&, const SyntheticProfile&) = default;
};

/// Profile JSON: `{name, start, end, columns: [{name, type, description,
/// gen: {...}, missing, invalid, invalid_codes}]}`. Throws DataError.
SyntheticProfile parse_profile(std::string_view text);
std::string serialize_profile(const SyntheticProfile& profile);

/// Built-in profiles: "picanet" and "minap". Throws DataError otherwise.
SyntheticProfile builtin_profile(std::string_view name);
std::vector<std::string> builtin_profile_names();

/// Pure function of (seed, n, profile). Throws DataError when n < 0 or the
/// profile is inconsistent (e.g. date_after with an unknown or later base).
DataTable generate_synthetic(std::uint64_t seed, std::int64_t n, const SyntheticProfile& profile);

}  // namespace qualdash::dataio
