#include "qualdash/aggregate/filter.hpp"

#include <algorithm>
#include <iterator>

namespace qualdash::aggregate {

using dataio::DataTable;
using dataio::Record;
using dataio::Value;

std::size_t column_of(const DataTable& table, std::string_view field) {
    auto c = table.column(field);
    if (!c) throw AggregateError("unknown field '" + std::string(field) + "'");
    return *c;
}

bool eval_predicate(const mss::Predicate& p, const Value& v) {
    using Kind = mss::Predicate::Kind;
    switch (p.kind) {
        case Kind::equals:
        case Kind::in:
            for (const auto& lit : p.values) {
                if (dataio::matches_literal(v, lit)) return true;
            }
            return false;
        case Kind::is_missing:
            return dataio::is_missing(v);
        case Kind::negate:
            return !eval_predicate(p.inner.front(), v);
    }
    return false;
}

bool in_valid_list(const Value& v, const std::vector<mss::Literal>& values) {
    for (const auto& lit : values) {
        if (dataio::matches_literal(v, lit)) return true;
    }
    return false;
}

MeasureFilter::MeasureFilter(const DataTable& table, const mss::MeasureSpec& measure) : op_(measure.op_or_default()) {
    for (const auto& clause : measure.where) where_.push_back({column_of(table, clause.field), &clause.predicate});
    for (const auto& [field, values] : measure.valid) valid_.push_back({column_of(table, field), &values});
}

bool MeasureFilter::passes_where(const Record& rec) const {
    if (op_ == mss::Operator::conjunction) {
        for (const auto& c : where_) {
            if (!eval_predicate(*c.predicate, rec[c.col])) return false;
        }
        return true;
    }
    for (const auto& c : where_) {
        if (eval_predicate(*c.predicate, rec[c.col])) return true;
    }
    return false;
}

bool MeasureFilter::passes_valid(const Record& rec) const {
    for (const auto& v : valid_) {
        if (!in_valid_list(rec[v.col], *v.values)) return false;
    }
    return true;
}

RowSet rows_in_timeframe(const DataTable& table, std::string_view xfield, const Timeframe& tf) {
    const std::size_t xcol = column_of(table, xfield);
    RowSet out;
    for (std::size_t r = 0; r < table.row_count(); ++r) {
        auto d = dataio::as_date(table.at(r, xcol));
        if (d && tf.contains(*d)) out.push_back(r);
    }
    return out;
}

RowSet filter_records(const DataTable& table, const mss::MeasureSpec& measure, const Timeframe& tf,
                      std::string_view xfield) {
    const std::size_t xcol = column_of(table, xfield);
    const MeasureFilter filter(table, measure);
    RowSet out;
    const auto& rows = table.rows();
    for (std::size_t r = 0; r < rows.size(); ++r) {
        auto d = dataio::as_date(rows[r][xcol]);
        if (d && tf.contains(*d) && filter.matches(rows[r])) out.push_back(r);
    }
    return out;
}

RowSet cohort_rows(const DataTable& table, const mss::MetricSpec& spec, const Timeframe& tf,
                   std::string_view xfield) {
    const std::size_t xcol = column_of(table, xfield);
    std::vector<MeasureFilter> filters;
    for (const auto& [name, measure] : spec.measures) filters.emplace_back(table, measure);
    RowSet out;
    const auto& rows = table.rows();
    for (std::size_t r = 0; r < rows.size(); ++r) {
        auto d = dataio::as_date(rows[r][xcol]);
        if (!d || !tf.contains(*d)) continue;
        for (const auto& f : filters) {
            if (f.matches(rows[r])) {
                out.push_back(r);
                break;
            }
        }
    }
    return out;
}

RowSet intersect(const RowSet& a, const RowSet& b) {
    RowSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

RowSet unite(const RowSet& a, const RowSet& b) {
    RowSet out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

}  // namespace qualdash::aggregate
