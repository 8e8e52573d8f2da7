#include "qualdash/aggregate/series.hpp"

#include <algorithm>

namespace qualdash::aggregate {

using dataio::DataTable;
using dataio::Value;

std::optional<double> numeric_value(const Value& v) {
    if (const auto* d = std::get_if<double>(&v)) return *d;
    if (const auto* b = std::get_if<bool>(&v)) return *b ? 1.0 : 0.0;
    return std::nullopt;
}

namespace {

bool counts_as_present(const Value& v) {
    if (const auto* b = std::get_if<bool>(&v)) return *b;
    return !dataio::is_missing(v);
}

std::string rule_name(RuleKind r) { return std::string(mss::to_string(r)); }

}  // namespace

BinSeries apply_running(const BinSeries& base, RuleKind kind, const std::vector<std::vector<double>>& record_values) {
    BinSeries out = base;
    out.rule = kind;
    if (kind == RuleKind::running_sum) {
        double acc = 0;
        for (auto& b : out.bins) {
            acc += b.value.value_or(0.0);
            b.value = acc;
        }
        return out;
    }
    if (kind != RuleKind::running_average) throw AggregateError("apply_running needs runningSum or runningAverage");
    if (record_values.size() != out.bins.size()) throw AggregateError("record values do not match the bin count");
    double sum = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < out.bins.size(); ++i) {
        for (double v : record_values[i]) {
            sum += v;
            ++n;
        }
        out.bins[i].value = n ? std::optional<double>(sum / static_cast<double>(n)) : std::nullopt;
    }
    return out;
}

BinSeries series_over_rows(const DataTable& table, const RowSet& rows, std::string_view xfield,
                           const std::optional<std::string>& value_field, RuleKind rule, Granularity g,
                           const Timeframe& tf) {
    if (rule != RuleKind::count && rule != RuleKind::running_sum && !value_field) {
        throw AggregateError("rule " + rule_name(rule) + " needs a value field");
    }
    const std::size_t xcol = column_of(table, xfield);
    const std::optional<std::size_t> vcol =
        value_field ? std::optional<std::size_t>(column_of(table, *value_field)) : std::nullopt;
    const BinIndex index(tf, g);

    BinSeries out;
    out.granularity = g;
    out.rule = rule;
    out.bins.reserve(index.size());
    for (Date s : index.starts()) out.bins.push_back(Bin{s, std::nullopt});

    std::vector<double> sums(index.size(), 0.0);
    std::vector<std::size_t> counts(index.size(), 0);
    std::vector<std::vector<double>> values;
    if (rule == RuleKind::running_average) values.resize(index.size());

    const bool summing = rule == RuleKind::sum || rule == RuleKind::average ||
                         (rule == RuleKind::running_sum && vcol.has_value());
    for (std::size_t r : rows) {
        const auto& rec = table.rows()[r];
        auto d = dataio::as_date(rec[xcol]);
        if (!d || !tf.contains(*d)) continue;
        auto bin = index.index_of(*d);
        if (!bin) continue;
        ++out.records;
        if (!vcol) {
            ++counts[*bin];
            continue;
        }
        const Value& v = rec[*vcol];
        if (summing || rule == RuleKind::running_average) {
            auto x = numeric_value(v);
            if (!x) continue;
            sums[*bin] += *x;
            ++counts[*bin];
            if (rule == RuleKind::running_average) values[*bin].push_back(*x);
        } else if (counts_as_present(v)) {
            ++counts[*bin];
        }
    }

    for (std::size_t i = 0; i < out.bins.size(); ++i) {
        switch (rule) {
            case RuleKind::count:
                out.bins[i].value = static_cast<double>(counts[i]);
                break;
            case RuleKind::sum:
                out.bins[i].value = sums[i];
                break;
            case RuleKind::average:
                if (counts[i]) out.bins[i].value = sums[i] / static_cast<double>(counts[i]);
                break;
            case RuleKind::running_sum:
                out.bins[i].value = summing ? sums[i] : static_cast<double>(counts[i]);
                break;
            case RuleKind::running_average:
                break;
        }
    }
    if (mss::is_running(rule)) return apply_running(out, rule, values);
    return out;
}

BinSeries interval_series(const DataTable& table, std::string_view start_field, std::string_view end_field,
                          Granularity g, const Timeframe& tf, const RowSet* rows, IntervalConvention convention) {
    const std::size_t scol = column_of(table, start_field);
    const std::size_t ecol = column_of(table, end_field);
    const BinIndex index(tf, g);

    BinSeries out;
    out.granularity = g;
    out.rule = RuleKind::sum;
    std::vector<long long> days(index.size(), 0);
    const Date limit = tf.to + std::chrono::days{1};

    auto visit = [&](std::size_t r) {
        const auto& rec = table.rows()[r];
        auto s = dataio::as_date(rec[scol]);
        auto e = dataio::as_date(rec[ecol]);
        if (!s || !e || *e < *s) return;
        const Date end = convention == IntervalConvention::inclusive ? *e + std::chrono::days{1} : *e;
        Date lo = std::max(*s, tf.from);
        const Date hi = std::min(end, limit);
        if (lo >= hi) return;
        ++out.records;
        auto bin = index.index_of(lo);
        for (std::size_t i = *bin; lo < hi && i < index.size(); ++i) {
            const Date next = next_bin(index.starts()[i], g);
            days[i] += (std::min(hi, next) - lo).count();
            lo = next;
        }
    };
    if (rows) {
        for (std::size_t r : *rows) visit(r);
    } else {
        for (std::size_t r = 0; r < table.row_count(); ++r) visit(r);
    }

    out.bins.reserve(index.size());
    for (std::size_t i = 0; i < index.size(); ++i) {
        out.bins.push_back(Bin{index.starts()[i], static_cast<double>(days[i])});
    }
    return out;
}

BinSeries measure_series(const DataTable& table, const mss::MeasureSpec& measure, RuleKind rule,
                         std::string_view xfield, Granularity g, const Timeframe& tf, IntervalConvention convention) {
    if (measure.is_interval()) {
        if (rule != RuleKind::count && rule != RuleKind::sum && rule != RuleKind::running_sum) {
            throw AggregateError("interval measures support count, sum and runningSum, not " + rule_name(rule));
        }
        const MeasureFilter filter(table, measure);
        RowSet rows;
        for (std::size_t r = 0; r < table.row_count(); ++r) {
            if (filter.matches(table.rows()[r])) rows.push_back(r);
        }
        BinSeries base = interval_series(table, *measure.start, *measure.end, g, tf, &rows, convention);
        if (rule == RuleKind::running_sum) return apply_running(base, rule, {});
        base.rule = rule;
        return base;
    }
    if ((rule == RuleKind::average || rule == RuleKind::sum || rule == RuleKind::running_average) && !measure.field) {
        throw AggregateError("rule " + rule_name(rule) + " needs a measure field");
    }
    const RowSet rows = filter_records(table, measure, tf, xfield);
    const std::optional<std::string> value_field = rule == RuleKind::count ? std::nullopt : measure.field;
    return series_over_rows(table, rows, xfield, value_field, rule, g, tf);
}

std::vector<YearSeries> yearly_context(const DataTable& table, const mss::MetricSpec& spec, std::string_view measure,
                                       std::string_view xfield, Granularity g, int tspan, const Timeframe& anchor,
                                       IntervalConvention convention) {
    const mss::MeasureSpec* m = spec.find_measure(measure);
    if (!m) throw AggregateError("metric '" + spec.metric + "' declares no measure '" + std::string(measure) + "'");
    if (tspan < 1) throw AggregateError("tspan must be at least 1");
    const int last = dataio::year_of(anchor.to);
    std::vector<YearSeries> out;
    for (int y = last - tspan + 1; y <= last; ++y) {
        BinSeries s = measure_series(table, *m, spec.rule_for(measure), xfield, g, Timeframe::year(y), convention);
        s.measure = std::string(measure);
        out.push_back(YearSeries{y, std::move(s)});
    }
    return out;
}

}  // namespace qualdash::aggregate
