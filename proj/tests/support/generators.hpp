// Seeded generators for property tests.
#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qualdash/aggregate/timeframe.hpp"
#include "qualdash/dataio/table.hpp"
#include "qualdash/mss/config.hpp"

namespace qualdash::testing {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    int between(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
    bool chance(double p) { return std::bernoulli_distribution(p)(engine_); }
    template <typename T>
    const T& pick(const std::vector<T>& xs) {
        return xs[std::size_t(between(0, int(xs.size()) - 1))];
    }
    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

/// Columns of the generated tables.
///   Key    nominal id         Admit  temporal (1% missing)
///   Cat    nominal a..d       Kind   nominal x|y
///   Num    quantitative       Flag   boolean
///   Start  temporal           End    temporal, may precede Start
inline mss::DataDictionary generated_dictionary() {
    using T = mss::FieldType;
    return mss::DataDictionary({{"Key", T::nominal, "Record key"},
                                {"Admit", T::temporal, "Admission date"},
                                {"Cat", T::nominal, "Category"},
                                {"Kind", T::nominal, "Kind"},
                                {"Num", T::quantitative, "Score"},
                                {"Flag", T::boolean, "Flag"},
                                {"Start", T::temporal, "Interval start"},
                                {"End", T::temporal, "Interval end"}});
}

inline const std::vector<std::string> kCats = {"a", "b", "c", "d"};
inline const std::vector<std::string> kKinds = {"x", "y"};

inline dataio::Date random_date(Rng& rng, dataio::Date lo, int span_days) {
    return lo + std::chrono::days(rng.between(0, span_days));
}

inline dataio::DataTable random_table(Rng& rng, std::size_t n) {
    const auto base = dataio::make_date(2018, 1, 1);
    std::vector<dataio::Record> rows;
    rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        dataio::Record r(8);
        r[0] = "K" + std::to_string(100000 + i);
        if (!rng.chance(0.01)) r[1] = random_date(rng, base, 3 * 366);
        if (!rng.chance(0.1)) r[2] = rng.pick(kCats);
        r[3] = rng.pick(kKinds);
        if (!rng.chance(0.1)) r[4] = rng.chance(0.5) ? double(rng.between(0, 20)) : rng.between(0, 400) / 8.0;
        if (!rng.chance(0.1)) r[5] = rng.chance(0.5);
        if (!rng.chance(0.05)) {
            const auto s = random_date(rng, base, 3 * 366);
            r[6] = s;
            if (!rng.chance(0.05)) r[7] = s + std::chrono::days(rng.between(-3, 70));
        }
        rows.push_back(std::move(r));
    }
    return dataio::DataTable(generated_dictionary(), std::move(rows));
}

inline mss::Literal random_literal_for(Rng& rng, const std::string& field) {
    if (field == "Num") return double(rng.between(0, 20));
    if (field == "Flag") return rng.chance(0.5);
    if (field == "Kind") return rng.pick(kKinds);
    return rng.pick(kCats);
}

inline mss::Predicate random_predicate(Rng& rng, const std::string& field, int depth = 0) {
    const int k = rng.between(0, depth > 0 ? 2 : 3);
    if (k == 0) return mss::Predicate::equals(random_literal_for(rng, field));
    if (k == 1) {
        std::vector<mss::Literal> vs;
        for (int i = rng.between(1, 3); i > 0; --i) vs.push_back(random_literal_for(rng, field));
        return mss::Predicate::in(std::move(vs));
    }
    if (k == 2) return mss::Predicate::is_missing();
    return mss::Predicate::negate(random_predicate(rng, field, depth + 1));
}

/// A non-interval measure over the generated schema, valid for `rule`.
inline mss::MeasureSpec random_measure(Rng& rng, mss::RuleKind rule) {
    mss::MeasureSpec m;
    std::vector<std::string> fields = {"Cat", "Kind", "Num", "Flag"};
    std::shuffle(fields.begin(), fields.end(), rng.engine());
    for (int i = 0, n = rng.between(0, 3); i < n; ++i) m.where.push_back({fields[i], random_predicate(rng, fields[i])});
    if (rng.chance(0.6)) m.op = rng.chance(0.5) ? mss::Operator::conjunction : mss::Operator::disjunction;
    if (rng.chance(0.3)) {
        std::vector<mss::Literal> allowed;
        for (const auto& c : kCats) {
            if (rng.chance(0.7)) allowed.push_back(c);
        }
        m.valid.emplace_back("Cat", std::move(allowed));
    }
    const bool needs_field = rule == mss::RuleKind::sum || rule == mss::RuleKind::average ||
                             rule == mss::RuleKind::running_average;
    if (needs_field || (rule == mss::RuleKind::running_sum && rng.chance(0.5))) {
        m.field = rng.chance(0.8) ? "Num" : "Flag";
    }
    return m;
}

inline aggregate::Timeframe random_timeframe(Rng& rng) {
    const auto from = random_date(rng, dataio::make_date(2017, 10, 1), 3 * 366);
    return aggregate::Timeframe{from, from + std::chrono::days(rng.between(0, 500))};
}

inline mss::Granularity random_granularity(Rng& rng) {
    static const std::vector<mss::Granularity> gs = {mss::Granularity::day, mss::Granularity::month,
                                                     mss::Granularity::quarter, mss::Granularity::year};
    return rng.pick(gs);
}

inline mss::RuleKind random_rule(Rng& rng) {
    static const std::vector<mss::RuleKind> rs = {mss::RuleKind::count, mss::RuleKind::sum, mss::RuleKind::average,
                                                  mss::RuleKind::running_sum, mss::RuleKind::running_average};
    return rng.pick(rs);
}

// Configs ----------------------------------------------------------------

inline const std::vector<std::string> kNamePool = {"Mortality", "Bed days", "SMR", "a/b", "x~y", "quote\"d",
                                                   "caf\xc3\xa9", "tab\tname", "Alive", "Deaths", "PIM", "z"};

inline std::string random_name(Rng& rng, std::vector<std::string>& used) {
    for (;;) {
        std::string s = rng.pick(kNamePool) + (rng.chance(0.5) ? std::to_string(rng.between(0, 99)) : "");
        if (std::find(used.begin(), used.end(), s) == used.end()) {
            used.push_back(s);
            return s;
        }
    }
}

inline mss::Literal random_config_literal(Rng& rng) {
    switch (rng.between(0, 3)) {
        case 0: return double(rng.between(-50, 50));
        case 1: return rng.between(-400, 400) / 4.0;
        case 2: return rng.chance(0.5);
        default: return rng.pick(kNamePool);
    }
}

/// A structurally valid config exercising every optional key at random.
inline mss::DashboardConfig random_config(Rng& rng) {
    mss::DashboardConfig c;
    std::vector<std::string> used_fields;
    c.audit = rng.pick(kNamePool);
    c.xfield = random_name(rng, used_fields);
    if (rng.chance(0.5)) c.primary_key = random_name(rng, used_fields);
    std::vector<std::string> used_headers;
    for (int i = rng.between(0, 2); i > 0; --i) c.field_aliases.emplace_back(random_name(rng, used_headers), rng.pick(kNamePool));

    std::vector<std::string> used_metrics;
    for (int mi = rng.between(0, 3); mi > 0; --mi) {
        mss::MetricSpec s;
        s.metric = random_name(rng, used_metrics);
        if (rng.chance(0.5)) s.desc = rng.pick(kNamePool);
        if (rng.chance(0.3)) s.xfield = rng.pick(kNamePool);
        if (rng.chance(0.5)) s.mark = rng.chance(0.5) ? mss::Mark::bar : mss::Mark::line;
        if (rng.chance(0.5)) s.chart = rng.chance(0.5) ? mss::ChartKind::stacked : mss::ChartKind::grouped;
        if (rng.chance(0.5)) s.ylabel = rng.pick(kNamePool);
        for (int i = rng.between(0, 3); i > 0; --i) s.legend.push_back(rng.pick(kNamePool));

        std::vector<std::string> used_measures;
        for (int i = rng.between(1, 5); i > 0; --i) {
            mss::MeasureSpec m;
            std::vector<std::string> where_fields = {"start", "end"};
            for (int w = rng.between(0, 3); w > 0; --w) {
                const std::string f = random_name(rng, where_fields);
                m.where.push_back({f, random_predicate(rng, "Cat")});
                if (rng.chance(0.3)) m.where.back().predicate = mss::Predicate::equals(random_config_literal(rng));
            }
            if (rng.chance(0.5)) m.op = rng.chance(0.5) ? mss::Operator::conjunction : mss::Operator::disjunction;
            std::vector<std::string> valid_fields;
            for (int v = rng.between(0, 2); v > 0; --v) {
                std::vector<mss::Literal> vs;
                for (int k = rng.between(0, 3); k > 0; --k) vs.push_back(random_config_literal(rng));
                m.valid.emplace_back(random_name(rng, valid_fields), std::move(vs));
            }
            if (rng.chance(0.4)) m.field = rng.pick(kNamePool);
            if (rng.chance(0.2)) {
                m.start = rng.pick(kNamePool);
                m.end = rng.pick(kNamePool);
            }
            s.measures.emplace_back(random_name(rng, used_measures), std::move(m));
        }
        for (const auto& [name, m] : s.measures) {
            if (rng.chance(0.6)) s.yaggregates.emplace_back(name, random_rule(rng));
        }
        for (int i = rng.between(0, 3); i > 0; --i) s.subsidiary.categories.push_back(rng.pick(kNamePool));
        for (int i = rng.between(0, 5); i > 0; --i) s.subsidiary.quantities.push_back({rng.pick(kNamePool), random_rule(rng)});
        std::vector<mss::Granularity> gs = {mss::Granularity::day, mss::Granularity::month, mss::Granularity::quarter,
                                            mss::Granularity::year};
        std::shuffle(gs.begin(), gs.end(), rng.engine());
        for (int i = 0, n = rng.between(0, 3); i < n; ++i) {
            std::vector<std::string> names;
            for (const auto& [name, m] : s.measures) {
                if (rng.chance(0.5)) names.push_back(name);
            }
            s.subsidiary.times.emplace_back(gs[i], std::move(names));
        }
        if (rng.chance(0.5)) s.subsidiary.tspan = rng.between(1, 10);
        if (rng.chance(0.4)) {
            s.event = mss::EventSpec{rng.pick(kNamePool), rng.pick(kNamePool), rng.chance(0.5) ? rng.pick(kNamePool) : "",
                                     rng.pick(kNamePool)};
        }
        c.metrics.push_back(std::move(s));
    }
    return c;
}

}  // namespace qualdash::testing
