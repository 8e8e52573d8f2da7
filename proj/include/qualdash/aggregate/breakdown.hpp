#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qualdash/aggregate/filter.hpp"
#include "qualdash/aggregate/timeframe.hpp"
#include "qualdash/dataio/table.hpp"
#include "qualdash/mss/config.hpp"

namespace qualdash::aggregate {

/// Label under which Missing category values are grouped.
inline constexpr std::string_view kMissingLabel = "(missing)";

struct CategoryValue {
    std::string field;
    std::string value;  // canonical cell text, or kMissingLabel

    friend bool operator==(const CategoryValue&, const CategoryValue&) = default;
};

/// A brushed subset of a card's cohort. Every populated part restricts the
/// cohort and the parts compose conjunctively; an empty selection keeps the
/// whole cohort.
struct Selection {
    std::vector<Date> bins;  // bin starts at `granularity`
    Granularity granularity = Granularity::month;
    std::optional<CategoryValue> category;
    std::vector<std::string> record_ids;  // primary-key values
    std::optional<std::string> measure;   // narrow the cohort to one measure

    bool empty() const { return bins.empty() && !category && record_ids.empty() && !measure; }
    std::string describe() const;

    friend bool operator==(const Selection&, const Selection&) = default;
};

/// Text used to match a cell against a category value.
std::string category_text(const dataio::Value& v);

/// Narrows a cohort by a selection. Record ids need key_field.
/// Throws AggregateError for an unknown measure, field, or a missing key field.
RowSet apply_selection(const dataio::DataTable& table, const mss::MetricSpec& spec, const RowSet& cohort,
                       const Selection& selection, std::string_view xfield, const Timeframe& tf,
                       const std::optional<std::string>& key_field = std::nullopt);

struct DistributionEntry {
    std::string value;
    std::size_t count = 0;
    double share = 0;

    friend bool operator==(const DistributionEntry&, const DistributionEntry&) = default;
};

struct Distribution {
    std::string field;
    std::vector<DistributionEntry> entries;  // count descending, then value
    std::size_t total = 0;

    friend bool operator==(const Distribution&, const Distribution&) = default;
};

Distribution distribution_of(const dataio::DataTable& table, const RowSet& rows, std::string_view field);

/// Distribution of a declared category over the metric's union cohort
/// narrowed by the selection. Throws AggregateError for an undeclared category.
Distribution breakdown(const dataio::DataTable& table, const mss::MetricSpec& spec, std::string_view category_field,
                       const Selection& selection, std::string_view xfield, const Timeframe& tf,
                       const std::optional<std::string>& key_field = std::nullopt);

}  // namespace qualdash::aggregate
