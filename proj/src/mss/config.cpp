#include "qualdash/mss/config.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>

namespace qualdash::mss {

namespace {

template <typename E, std::size_t N>
std::optional<E> lookup(const std::array<std::pair<std::string_view, E>, N>& table, std::string_view s) {
    for (const auto& [name, value] : table) {
        if (name == s) return value;
    }
    return std::nullopt;
}

template <typename E, std::size_t N>
std::string_view name_of(const std::array<std::pair<std::string_view, E>, N>& table, E e) {
    for (const auto& [name, value] : table) {
        if (value == e) return name;
    }
    return "?";
}

constexpr std::array<std::pair<std::string_view, Mark>, 2> kMarks{{{"bar", Mark::bar}, {"line", Mark::line}}};
constexpr std::array<std::pair<std::string_view, ChartKind>, 2> kCharts{
    {{"stacked", ChartKind::stacked}, {"grouped", ChartKind::grouped}}};
constexpr std::array<std::pair<std::string_view, Operator>, 2> kOperators{
    {{"and", Operator::conjunction}, {"or", Operator::disjunction}}};
constexpr std::array<std::pair<std::string_view, RuleKind>, 5> kRules{{{"count", RuleKind::count},
                                                                       {"sum", RuleKind::sum},
                                                                       {"runningSum", RuleKind::running_sum},
                                                                       {"average", RuleKind::average},
                                                                       {"runningAverage", RuleKind::running_average}}};
constexpr std::array<std::pair<std::string_view, Granularity>, 4> kGranularities{{{"day", Granularity::day},
                                                                                  {"month", Granularity::month},
                                                                                  {"quarter", Granularity::quarter},
                                                                                  {"year", Granularity::year}}};

}  // namespace

std::string_view to_string(Mark m) { return name_of(kMarks, m); }
std::string_view to_string(ChartKind c) { return name_of(kCharts, c); }
std::string_view to_string(Operator op) { return name_of(kOperators, op); }
std::string_view to_string(RuleKind r) { return name_of(kRules, r); }
std::string_view to_string(Granularity g) { return name_of(kGranularities, g); }

std::optional<Mark> parse_mark(std::string_view s) { return lookup(kMarks, s); }
std::optional<ChartKind> parse_chart(std::string_view s) { return lookup(kCharts, s); }
std::optional<Operator> parse_operator(std::string_view s) { return lookup(kOperators, s); }
std::optional<RuleKind> parse_rule(std::string_view s) { return lookup(kRules, s); }
std::optional<Granularity> parse_granularity(std::string_view s) { return lookup(kGranularities, s); }

std::string literal_text(const Literal& lit) {
    if (const auto* s = std::get_if<std::string>(&lit)) return *s;
    if (const auto* b = std::get_if<bool>(&lit)) return *b ? "true" : "false";
    const double d = std::get<double>(lit);
    std::array<char, 32> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), d);
    return std::string(buf.data(), res.ptr);
}

Predicate Predicate::equals(Literal v) {
    Predicate p;
    p.kind = Kind::equals;
    p.values.push_back(std::move(v));
    return p;
}

Predicate Predicate::in(std::vector<Literal> vs) {
    Predicate p;
    p.kind = Kind::in;
    p.values = std::move(vs);
    return p;
}

Predicate Predicate::is_missing() {
    Predicate p;
    p.kind = Kind::is_missing;
    return p;
}

Predicate Predicate::negate(Predicate inner) {
    Predicate p;
    p.kind = Kind::negate;
    p.inner.push_back(std::move(inner));
    return p;
}

const MetricSpec* DashboardConfig::find_metric(std::string_view name) const {
    for (const auto& m : metrics) {
        if (m.metric == name) return &m;
    }
    for (const auto& m : metrics) {
        if (slugify(m.metric) == name) return &m;
    }
    return nullptr;
}

std::string DashboardConfig::resolve_field(std::string_view name) const {
    if (const std::string* canonical = find_entry(field_aliases, name)) return *canonical;
    return std::string(name);
}

DashboardConfig canonicalize(const DashboardConfig& config) {
    DashboardConfig out = config;
    auto fix = [&](std::string& f) { f = config.resolve_field(f); };
    fix(out.xfield);
    if (out.primary_key) fix(*out.primary_key);
    for (auto& metric : out.metrics) {
        if (metric.xfield) fix(*metric.xfield);
        for (auto& [name, measure] : metric.measures) {
            for (auto& clause : measure.where) fix(clause.field);
            for (auto& [field, values] : measure.valid) fix(field);
            if (measure.field) fix(*measure.field);
            if (measure.start) fix(*measure.start);
            if (measure.end) fix(*measure.end);
        }
        for (auto& c : metric.subsidiary.categories) fix(c);
        for (auto& q : metric.subsidiary.quantities) fix(q.field);
        if (metric.event) {
            fix(metric.event->date);
            fix(metric.event->id);
        }
    }
    return out;
}

std::vector<std::string> measure_fields(const MetricSpec& spec) {
    std::vector<std::string> out;
    auto add = [&](const std::string& f) {
        if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
    };
    for (const auto& [name, measure] : spec.measures) {
        for (const auto& clause : measure.where) add(clause.field);
        for (const auto& [field, values] : measure.valid) add(field);
        if (measure.field) add(*measure.field);
        if (measure.start) add(*measure.start);
        if (measure.end) add(*measure.end);
    }
    return out;
}

std::string slugify(std::string_view title) {
    std::string out;
    bool dash = false;
    for (unsigned char c : title) {
        if (std::isalnum(c)) {
            if (dash && !out.empty()) out.push_back('-');
            out.push_back(static_cast<char>(std::tolower(c)));
            dash = false;
        } else {
            dash = true;
        }
    }
    return out;
}

}  // namespace qualdash::mss
