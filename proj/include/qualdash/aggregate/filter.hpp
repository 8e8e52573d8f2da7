#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "qualdash/aggregate/timeframe.hpp"
#include "qualdash/dataio/table.hpp"
#include "qualdash/mss/config.hpp"

namespace qualdash::aggregate {

using RowSet = std::vector<std::size_t>;  // ascending row indices

/// A measure's where/valid clauses bound to a table's columns.
class MeasureFilter {
public:
    /// Throws AggregateError for a field the table does not have.
    MeasureFilter(const dataio::DataTable& table, const mss::MeasureSpec& measure);

    bool passes_where(const dataio::Record& rec) const;
    bool passes_valid(const dataio::Record& rec) const;
    bool matches(const dataio::Record& rec) const { return passes_where(rec) && passes_valid(rec); }

private:
    struct Clause {
        std::size_t col;
        const mss::Predicate* predicate;
    };
    struct ValidList {
        std::size_t col;
        const std::vector<mss::Literal>* values;
    };
    std::vector<Clause> where_;
    std::vector<ValidList> valid_;
    mss::Operator op_;
};

bool eval_predicate(const mss::Predicate& p, const dataio::Value& v);

/// True when the literal list admits the value. Missing is never admitted.
bool in_valid_list(const dataio::Value& v, const std::vector<mss::Literal>& values);

/// Column index or AggregateError.
std::size_t column_of(const dataio::DataTable& table, std::string_view field);

/// Rows whose time field holds a date inside the timeframe.
RowSet rows_in_timeframe(const dataio::DataTable& table, std::string_view xfield, const Timeframe& tf);

/// Rows in the timeframe that satisfy the measure's where and valid clauses.
RowSet filter_records(const dataio::DataTable& table, const mss::MeasureSpec& measure, const Timeframe& tf,
                      std::string_view xfield);

/// Union of filter_records over every measure of a metric.
RowSet cohort_rows(const dataio::DataTable& table, const mss::MetricSpec& spec, const Timeframe& tf,
                   std::string_view xfield);

RowSet intersect(const RowSet& a, const RowSet& b);
RowSet unite(const RowSet& a, const RowSet& b);

}  // namespace qualdash::aggregate
