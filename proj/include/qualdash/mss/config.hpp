// Domain model for dashboard configurations: one DashboardConfig per audit,
// holding an ordered list of metric specifications. Each metric specification
// is self-contained and drives exactly one card.
//
// Optional keys stay optional here. Defaults are applied by the accessors
// (mark_or_default() etc.) so that serializing a parsed config never
// materializes keys the author left out.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace qualdash::mss {

template <typename V>
using OrderedMap = std::vector<std::pair<std::string, V>>;

template <typename V>
const V* find_entry(const OrderedMap<V>& map, std::string_view key) {
    for (const auto& [k, v] : map) {
        if (k == key) return &v;
    }
    return nullptr;
}

enum class Mark { bar, line };
enum class ChartKind { stacked, grouped };
enum class Operator { conjunction, disjunction };
enum class RuleKind { count, sum, running_sum, average, running_average };
enum class Granularity { day, month, quarter, year };

std::string_view to_string(Mark m);
std::string_view to_string(ChartKind c);
std::string_view to_string(Operator op);
std::string_view to_string(RuleKind r);
std::string_view to_string(Granularity g);

std::optional<Mark> parse_mark(std::string_view s);
std::optional<ChartKind> parse_chart(std::string_view s);
std::optional<Operator> parse_operator(std::string_view s);
std::optional<RuleKind> parse_rule(std::string_view s);
std::optional<Granularity> parse_granularity(std::string_view s);

inline bool is_running(RuleKind r) {
    return r == RuleKind::running_sum || r == RuleKind::running_average;
}

/// A scalar literal appearing in a filter or a valid-values list.
using Literal = std::variant<std::string, double, bool>;

std::string literal_text(const Literal& lit);

struct Predicate {
    enum class Kind { equals, in, is_missing, negate };

    Kind kind = Kind::equals;
    std::vector<Literal> values;   // one element for equals, the set for in
    std::vector<Predicate> inner;  // exactly one element for negate

    static Predicate equals(Literal v);
    static Predicate in(std::vector<Literal> vs);
    static Predicate is_missing();
    static Predicate negate(Predicate p);

    friend bool operator==(const Predicate&, const Predicate&) = default;
};

struct FilterClause {
    std::string field;
    Predicate predicate;

    friend bool operator==(const FilterClause&, const FilterClause&) = default;
};

struct MeasureSpec {
    std::vector<FilterClause> where;
    std::optional<Operator> op;
    OrderedMap<std::vector<Literal>> valid;
    std::optional<std::string> field;
    std::optional<std::string> start;
    std::optional<std::string> end;

    Operator op_or_default() const { return op.value_or(Operator::conjunction); }
    bool is_interval() const { return start.has_value() && end.has_value(); }

    friend bool operator==(const MeasureSpec&, const MeasureSpec&) = default;
};

struct QuantitySpec {
    std::string field;
    RuleKind aggregate = RuleKind::count;

    friend bool operator==(const QuantitySpec&, const QuantitySpec&) = default;
};

struct SubsidiaryConfig {
    std::vector<std::string> categories;
    std::vector<QuantitySpec> quantities;
    /// Granularity -> measures shown at it. The first entry is the default tab.
    std::vector<std::pair<Granularity, std::vector<std::string>>> times;
    std::optional<int> tspan;

    int tspan_or_default() const { return tspan.value_or(3); }
    Granularity default_granularity() const {
        return times.empty() ? Granularity::month : times.front().first;
    }

    friend bool operator==(const SubsidiaryConfig&, const SubsidiaryConfig&) = default;
};

struct EventSpec {
    std::string name;
    std::string date;  // field holding the event timestamp
    std::string desc;
    std::string id;    // field holding the record's primary key

    friend bool operator==(const EventSpec&, const EventSpec&) = default;
};

struct MetricSpec {
    std::string metric;
    std::optional<std::string> desc;
    std::optional<std::string> xfield;  // `data.xfield`; overrides the config-level time field
    std::optional<Mark> mark;
    std::optional<ChartKind> chart;
    std::optional<std::string> ylabel;
    std::vector<std::string> legend;
    OrderedMap<MeasureSpec> measures;
    OrderedMap<RuleKind> yaggregates;
    SubsidiaryConfig subsidiary;
    std::optional<EventSpec> event;

    Mark mark_or_default() const { return mark.value_or(Mark::bar); }
    ChartKind chart_or_default() const { return chart.value_or(ChartKind::grouped); }

    const MeasureSpec* find_measure(std::string_view name) const {
        return find_entry(measures, name);
    }
    /// Rule for a measure; count when yaggregates has no entry for it.
    RuleKind rule_for(std::string_view measure) const {
        const RuleKind* r = find_entry(yaggregates, measure);
        return r ? *r : RuleKind::count;
    }

    friend bool operator==(const MetricSpec&, const MetricSpec&) = default;
};

struct DashboardConfig {
    std::string audit;
    std::string xfield;
    std::optional<std::string> primary_key;
    OrderedMap<std::string> field_aliases;  // external header -> canonical field
    std::vector<MetricSpec> metrics;

    const MetricSpec* find_metric(std::string_view name) const;
    /// Canonical name of a field, following field_aliases when it names a header.
    std::string resolve_field(std::string_view name) const;

    friend bool operator==(const DashboardConfig&, const DashboardConfig&) = default;
};

/// Rewrites every field reference in the config to its canonical name.
/// Metric and measure names are untouched.
DashboardConfig canonicalize(const DashboardConfig& config);

/// Every field referenced by a metric's measures (where/valid/field/start/end),
/// in first-reference order, without duplicates.
std::vector<std::string> measure_fields(const MetricSpec& spec);

/// URL-safe identifier derived from a metric title: lowercase alphanumerics
/// with single dashes.
std::string slugify(std::string_view title);

}  // namespace qualdash::mss
