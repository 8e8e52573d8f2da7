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

using mss::RuleKind;

struct Bin {
    Date start;
    std::optional<double> value;  // nullopt renders as a gap, never as 0

    friend bool operator==(const Bin&, const Bin&) = default;
};

struct BinSeries {
    std::string measure;
    Granularity granularity = Granularity::month;
    RuleKind rule = RuleKind::count;
    std::vector<Bin> bins;
    std::size_t records = 0;  // records that fed the series

    friend bool operator==(const BinSeries&, const BinSeries&) = default;
};

/// How an interval's last day is counted. Half-open [start, end) makes a
/// same-day stay zero days; inclusive [start, end] counts it as one.
enum class IntervalConvention { half_open, inclusive };

/// Aggregates a row subset into bins of the time field.
///
///   count           rows per bin, or rows with a present value when
///                   value_field is set (booleans count when true)
///   sum / average   over numeric values of value_field; booleans are 0/1
///   runningSum      prefix sum of the count or sum series
///   runningAverage  cumulative record-weighted mean of value_field
///
/// Empty bins are 0 for count and sum, Absent for average.
/// Throws AggregateError when a rule other than count lacks a value field.
BinSeries series_over_rows(const dataio::DataTable& table, const RowSet& rows, std::string_view xfield,
                           const std::optional<std::string>& value_field, RuleKind rule, Granularity g,
                           const Timeframe& tf);

/// Series for one measure under one rule. Interval measures (start/end)
/// route to interval_series and accept count, sum and runningSum.
BinSeries measure_series(const dataio::DataTable& table, const mss::MeasureSpec& measure, RuleKind rule,
                         std::string_view xfield, Granularity g, const Timeframe& tf,
                         IntervalConvention convention = IntervalConvention::half_open);

/// Days of each interval falling in each bin, with intervals clipped to the
/// timeframe. Rows with a Missing endpoint or end before start contribute
/// nothing. When `rows` is null every table row is considered.
BinSeries interval_series(const dataio::DataTable& table, std::string_view start_field, std::string_view end_field,
                          Granularity g, const Timeframe& tf, const RowSet* rows = nullptr,
                          IntervalConvention convention = IntervalConvention::half_open);

/// Running transform of a base series. runningSum ignores record_values;
/// runningAverage ignores the base values and uses the per-bin record values.
BinSeries apply_running(const BinSeries& base, RuleKind kind, const std::vector<std::vector<double>>& record_values);

struct YearSeries {
    int year;
    BinSeries series;

    friend bool operator==(const YearSeries&, const YearSeries&) = default;
};

/// One series per calendar year, oldest first, ending with the anchor's
/// year; each spans its whole year. Throws AggregateError for an undeclared
/// measure or tspan < 1.
std::vector<YearSeries> yearly_context(const dataio::DataTable& table, const mss::MetricSpec& spec,
                                       std::string_view measure, std::string_view xfield, Granularity g, int tspan,
                                       const Timeframe& anchor,
                                       IntervalConvention convention = IntervalConvention::half_open);

/// Numeric reading of a cell: numbers as-is, booleans as 0/1.
std::optional<double> numeric_value(const dataio::Value& v);

}  // namespace qualdash::aggregate
