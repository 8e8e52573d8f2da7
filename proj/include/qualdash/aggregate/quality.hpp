#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "qualdash/aggregate/timeframe.hpp"
#include "qualdash/dataio/table.hpp"
#include "qualdash/mss/config.hpp"

namespace qualdash::aggregate {

struct FieldQuality {
    std::string field;
    std::size_t missing = 0;
    std::size_t invalid = 0;
    std::size_t valid = 0;
    std::size_t total = 0;

    friend bool operator==(const FieldQuality&, const FieldQuality&) = default;
};

struct QualityStats {
    std::vector<FieldQuality> fields;  // first-reference order within the metric
    std::size_t metric_total = 0;      // records in the timeframe
    std::size_t records_with_missing = 0;
    std::size_t records_with_invalid = 0;

    const FieldQuality* find(std::string_view field) const;
    /// "x missing / y invalid of N records", counting records.
    std::string summary() const;

    friend bool operator==(const QualityStats&, const QualityStats&) = default;
};

/// Classifies every field the metric's measures reference, over all records
/// whose time field lies in the timeframe. A value outside a valid list is
/// invalid; an interval ending before it starts marks its start field invalid.
QualityStats quality_stats(const dataio::DataTable& table, const mss::MetricSpec& spec, const Timeframe& tf,
                           std::string_view xfield);

}  // namespace qualdash::aggregate
