#include "qualdash/aggregate/breakdown.hpp"

#include <algorithm>
#include <map>
#include <unordered_set>

namespace qualdash::aggregate {

std::string Selection::describe() const {
    std::vector<std::string> parts;
    if (measure) parts.push_back("measure " + *measure);
    if (!bins.empty()) {
        std::string s = "bins";
        for (Date b : bins) s += " " + bin_label(b, granularity);
        parts.push_back(std::move(s));
    }
    if (category) parts.push_back(category->field + " = " + category->value);
    if (!record_ids.empty()) parts.push_back(std::to_string(record_ids.size()) + " record id(s)");
    if (parts.empty()) return "all records";
    std::string out = parts.front();
    for (std::size_t i = 1; i < parts.size(); ++i) out += "; " + parts[i];
    return out;
}

std::string category_text(const dataio::Value& v) {
    if (dataio::is_missing(v)) return std::string(kMissingLabel);
    return dataio::value_text(v);
}

RowSet apply_selection(const dataio::DataTable& table, const mss::MetricSpec& spec, const RowSet& cohort,
                       const Selection& selection, std::string_view xfield, const Timeframe& tf,
                       const std::optional<std::string>& key_field) {
    RowSet rows = cohort;
    if (selection.measure) {
        const mss::MeasureSpec* m = spec.find_measure(*selection.measure);
        if (!m) throw AggregateError("metric '" + spec.metric + "' declares no measure '" + *selection.measure + "'");
        rows = intersect(rows, filter_records(table, *m, tf, xfield));
    }
    if (!selection.bins.empty()) {
        const std::size_t xcol = column_of(table, xfield);
        std::vector<Date> wanted;
        for (Date b : selection.bins) wanted.push_back(bin_start(b, selection.granularity));
        std::sort(wanted.begin(), wanted.end());
        RowSet kept;
        for (std::size_t r : rows) {
            auto d = dataio::as_date(table.at(r, xcol));
            if (d && std::binary_search(wanted.begin(), wanted.end(), bin_start(*d, selection.granularity))) {
                kept.push_back(r);
            }
        }
        rows = std::move(kept);
    }
    if (selection.category) {
        const std::size_t col = column_of(table, selection.category->field);
        RowSet kept;
        for (std::size_t r : rows) {
            if (category_text(table.at(r, col)) == selection.category->value) kept.push_back(r);
        }
        rows = std::move(kept);
    }
    if (!selection.record_ids.empty()) {
        if (!key_field) throw AggregateError("selecting by record id needs a primary key field");
        const std::size_t col = column_of(table, *key_field);
        const std::unordered_set<std::string> ids(selection.record_ids.begin(), selection.record_ids.end());
        RowSet kept;
        for (std::size_t r : rows) {
            const auto& v = table.at(r, col);
            if (!dataio::is_missing(v) && ids.count(dataio::value_text(v))) kept.push_back(r);
        }
        rows = std::move(kept);
    }
    return rows;
}

Distribution distribution_of(const dataio::DataTable& table, const RowSet& rows, std::string_view field) {
    const std::size_t col = column_of(table, field);
    std::map<std::string, std::size_t> counts;
    for (std::size_t r : rows) ++counts[category_text(table.at(r, col))];
    Distribution out;
    out.field = std::string(field);
    out.total = rows.size();
    for (const auto& [value, count] : counts) {
        out.entries.push_back(
            DistributionEntry{value, count, static_cast<double>(count) / static_cast<double>(out.total)});
    }
    std::stable_sort(out.entries.begin(), out.entries.end(),
                     [](const DistributionEntry& a, const DistributionEntry& b) { return a.count > b.count; });
    return out;
}

Distribution breakdown(const dataio::DataTable& table, const mss::MetricSpec& spec, std::string_view category_field,
                       const Selection& selection, std::string_view xfield, const Timeframe& tf,
                       const std::optional<std::string>& key_field) {
    const auto& cats = spec.subsidiary.categories;
    if (std::find(cats.begin(), cats.end(), category_field) == cats.end()) {
        throw AggregateError("metric '" + spec.metric + "' has no category '" + std::string(category_field) + "'");
    }
    const RowSet cohort = cohort_rows(table, spec, tf, xfield);
    return distribution_of(table, apply_selection(table, spec, cohort, selection, xfield, tf, key_field),
                           category_field);
}

}  // namespace qualdash::aggregate
