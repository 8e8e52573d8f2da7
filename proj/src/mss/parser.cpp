#include "qualdash/mss/parser.hpp"

#include <initializer_list>
#include <set>

#include "json.hpp"

namespace qualdash::mss {

namespace {

using json = nlohmann::ordered_json;

std::string escape_pointer(std::string_view token) {
    std::string out;
    for (char c : token) {
        if (c == '~') {
            out += "~0";
        } else if (c == '/') {
            out += "~1";
        } else {
            out.push_back(c);
        }
    }
    return out;
}

std::string child(const std::string& path, std::string_view key) { return path + "/" + escape_pointer(key); }
std::string child(const std::string& path, std::size_t index) { return path + "/" + std::to_string(index); }

[[noreturn]] void malformed(const std::string& path, const std::string& message) {
    throw ConfigError("MalformedValue", path, message);
}

class Reader {
public:
    explicit Reader(std::vector<Diagnostic>* warnings) : warnings_(warnings) {}

    DashboardConfig read(const json& doc) {
        expect_object(doc, "");
        warn_unknown(doc, "", {"audit", "xfield", "primary_key", "field_aliases", "metrics"});

        DashboardConfig config;
        config.audit = required_string(doc, "audit", "");
        config.xfield = required_string(doc, "xfield", "");
        config.primary_key = optional_string(doc, "primary_key", "");

        if (auto it = doc.find("field_aliases"); it != doc.end()) {
            const std::string path = "/field_aliases";
            expect_object(*it, path);
            for (const auto& [header, canonical] : it->items()) {
                if (!canonical.is_string()) malformed(child(path, header), "alias target must be a string");
                config.field_aliases.emplace_back(header, canonical.get<std::string>());
            }
        }

        auto metrics = doc.find("metrics");
        if (metrics == doc.end()) throw ConfigError("MissingKey", "/metrics", "metrics array is required");
        if (!metrics->is_array()) malformed("/metrics", "expected an array");
        std::set<std::string> seen;
        for (std::size_t i = 0; i < metrics->size(); ++i) {
            const std::string path = child("/metrics", i);
            MetricSpec spec = read_metric((*metrics)[i], path);
            if (!seen.insert(spec.metric).second) {
                throw ConfigError("DuplicateMetric", child(path, "metric"), "metric '" + spec.metric + "' is declared twice");
            }
            config.metrics.push_back(std::move(spec));
        }
        return config;
    }

private:
    MetricSpec read_metric(const json& j, const std::string& path) {
        expect_object(j, path);
        warn_unknown(j, path,
                     {"metric", "desc", "data", "mark", "chart", "ylabel", "legend", "yfilters", "yaggregates",
                      "categories", "quantities", "times", "tspan", "event"});

        MetricSpec spec;
        spec.metric = required_string(j, "metric", path);
        spec.desc = optional_string(j, "desc", path);
        if (auto it = j.find("data"); it != j.end()) {
            const std::string data_path = child(path, "data");
            expect_object(*it, data_path);
            warn_unknown(*it, data_path, {"xfield"});
            spec.xfield = optional_string(*it, "xfield", data_path);
        }
        if (auto s = optional_string(j, "mark", path)) {
            spec.mark = parse_mark(*s);
            if (!spec.mark) malformed(child(path, "mark"), "mark must be bar or line");
        }
        if (auto s = optional_string(j, "chart", path)) {
            spec.chart = parse_chart(*s);
            if (!spec.chart) malformed(child(path, "chart"), "chart must be stacked or grouped");
        }
        spec.ylabel = optional_string(j, "ylabel", path);
        spec.legend = string_list(j, "legend", path);

        if (auto it = j.find("yfilters"); it != j.end()) {
            const std::string fpath = child(path, "yfilters");
            expect_object(*it, fpath);
            for (const auto& [name, body] : it->items()) {
                spec.measures.emplace_back(name, read_measure(body, child(fpath, name)));
            }
        }
        if (auto it = j.find("yaggregates"); it != j.end()) {
            const std::string apath = child(path, "yaggregates");
            expect_object(*it, apath);
            for (const auto& [name, rule] : it->items()) {
                spec.yaggregates.emplace_back(name, read_rule(rule, child(apath, name)));
            }
        }

        spec.subsidiary.categories = string_list(j, "categories", path);
        if (auto it = j.find("quantities"); it != j.end()) {
            const std::string qpath = child(path, "quantities");
            if (!it->is_array()) malformed(qpath, "expected an array");
            for (std::size_t i = 0; i < it->size(); ++i) {
                const auto& q = (*it)[i];
                const std::string ipath = child(qpath, i);
                expect_object(q, ipath);
                warn_unknown(q, ipath, {"field", "aggregate"});
                QuantitySpec quantity;
                quantity.field = required_string(q, "field", ipath);
                auto agg = q.find("aggregate");
                if (agg == q.end()) throw ConfigError("MissingKey", child(ipath, "aggregate"), "aggregate is required");
                quantity.aggregate = read_rule(*agg, child(ipath, "aggregate"));
                spec.subsidiary.quantities.push_back(std::move(quantity));
            }
        }
        if (auto it = j.find("times"); it != j.end()) {
            const std::string tpath = child(path, "times");
            expect_object(*it, tpath);
            for (const auto& [unit, measures] : it->items()) {
                auto granularity = parse_granularity(unit);
                if (!granularity) {
                    throw ConfigError("MalformedGranularity", child(tpath, unit),
                                      "granularity must be one of day, month, quarter, year");
                }
                if (!measures.is_array()) malformed(child(tpath, unit), "expected an array of measure names");
                std::vector<std::string> names;
                for (std::size_t i = 0; i < measures.size(); ++i) {
                    if (!measures[i].is_string()) malformed(child(child(tpath, unit), i), "expected a string");
                    names.push_back(measures[i].get<std::string>());
                }
                spec.subsidiary.times.emplace_back(*granularity, std::move(names));
            }
        }
        if (auto it = j.find("tspan"); it != j.end()) {
            if (!it->is_number_integer()) malformed(child(path, "tspan"), "tspan must be an integer");
            spec.subsidiary.tspan = it->get<int>();
        }
        if (auto it = j.find("event"); it != j.end()) {
            const std::string epath = child(path, "event");
            expect_object(*it, epath);
            warn_unknown(*it, epath, {"name", "date", "desc", "id"});
            EventSpec event;
            event.name = required_string(*it, "name", epath);
            event.date = required_string(*it, "date", epath);
            event.desc = optional_string(*it, "desc", epath).value_or("");
            event.id = required_string(*it, "id", epath);
            spec.event = std::move(event);
        }
        return spec;
    }

    MeasureSpec read_measure(const json& j, const std::string& path) {
        expect_object(j, path);
        warn_unknown(j, path, {"where", "operator", "valid", "field"});

        MeasureSpec m;
        if (auto it = j.find("where"); it != j.end()) {
            const std::string wpath = child(path, "where");
            expect_object(*it, wpath);
            for (const auto& [key, value] : it->items()) {
                const std::string cpath = child(wpath, key);
                if (key == "start" || key == "end") {
                    if (!value.is_string()) malformed(cpath, "boundary event must name a field");
                    (key == "start" ? m.start : m.end) = value.get<std::string>();
                    continue;
                }
                m.where.push_back(FilterClause{key, read_predicate(value, cpath)});
            }
        }
        if (auto s = optional_string(j, "operator", path)) {
            m.op = parse_operator(*s);
            if (!m.op) malformed(child(path, "operator"), "operator must be and or or");
        }
        if (auto it = j.find("valid"); it != j.end()) {
            const std::string vpath = child(path, "valid");
            expect_object(*it, vpath);
            for (const auto& [field, values] : it->items()) {
                const std::string fpath = child(vpath, field);
                if (!values.is_array()) malformed(fpath, "valid values must be an array");
                std::vector<Literal> list;
                for (std::size_t i = 0; i < values.size(); ++i) list.push_back(read_literal(values[i], child(fpath, i)));
                m.valid.emplace_back(field, std::move(list));
            }
        }
        m.field = optional_string(j, "field", path);
        return m;
    }

    Predicate read_predicate(const json& v, const std::string& path) {
        if (v.is_null()) return Predicate::is_missing();
        if (v.is_array()) {
            std::vector<Literal> values;
            for (std::size_t i = 0; i < v.size(); ++i) values.push_back(read_literal(v[i], child(path, i)));
            return Predicate::in(std::move(values));
        }
        if (v.is_object()) {
            if (v.size() != 1) malformed(path, "predicate object must have exactly one key");
            const auto& [key, arg] = *v.items().begin();
            if (key == "equals") return Predicate::equals(read_literal(arg, child(path, key)));
            if (key == "in") {
                if (!arg.is_array()) malformed(child(path, key), "in expects an array");
                return read_predicate(arg, child(path, key));
            }
            if (key == "is_missing") {
                if (!arg.is_boolean() || !arg.get<bool>()) malformed(child(path, key), "is_missing expects true");
                return Predicate::is_missing();
            }
            if (key == "not") return Predicate::negate(read_predicate(arg, child(path, key)));
            malformed(path, "unknown predicate '" + key + "'");
        }
        return Predicate::equals(read_literal(v, path));
    }

    static Literal read_literal(const json& v, const std::string& path) {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>();
        if (v.is_number()) return v.get<double>();
        malformed(path, "expected a string, number or boolean");
    }

    static RuleKind read_rule(const json& v, const std::string& path) {
        if (!v.is_string()) throw ConfigError("MalformedRule", path, "rule must be a string");
        auto rule = parse_rule(v.get<std::string>());
        if (!rule) {
            throw ConfigError("MalformedRule", path,
                              "'" + v.get<std::string>() +
                                  "' is not one of count, sum, runningSum, average, runningAverage");
        }
        return *rule;
    }

    static void expect_object(const json& j, const std::string& path) {
        if (!j.is_object()) malformed(path, "expected an object");
    }

    static std::string required_string(const json& j, const char* key, const std::string& path) {
        auto it = j.find(key);
        if (it == j.end()) throw ConfigError("MissingKey", child(path, key), std::string(key) + " is required");
        if (!it->is_string()) malformed(child(path, key), "expected a string");
        return it->get<std::string>();
    }

    static std::optional<std::string> optional_string(const json& j, const char* key, const std::string& path) {
        auto it = j.find(key);
        if (it == j.end()) return std::nullopt;
        if (!it->is_string()) malformed(child(path, key), "expected a string");
        return it->get<std::string>();
    }

    static std::vector<std::string> string_list(const json& j, const char* key, const std::string& path) {
        std::vector<std::string> out;
        auto it = j.find(key);
        if (it == j.end()) return out;
        const std::string lpath = child(path, key);
        if (!it->is_array()) malformed(lpath, "expected an array of strings");
        for (std::size_t i = 0; i < it->size(); ++i) {
            if (!(*it)[i].is_string()) malformed(child(lpath, i), "expected a string");
            out.push_back((*it)[i].get<std::string>());
        }
        return out;
    }

    void warn_unknown(const json& j, const std::string& path, std::initializer_list<std::string_view> known) {
        for (const auto& [key, value] : j.items()) {
            bool found = false;
            for (auto k : known) found = found || k == key;
            if (!found && warnings_) {
                warnings_->push_back({child(path, key), codes::kUnknownKey, "unknown key '" + key + "' ignored"});
            }
        }
    }

    std::vector<Diagnostic>* warnings_;
};

json write_literal(const Literal& lit) {
    return std::visit([](const auto& v) { return json(v); }, lit);
}

json write_predicate(const Predicate& p) {
    switch (p.kind) {
        case Predicate::Kind::equals:
            return write_literal(p.values.front());
        case Predicate::Kind::in: {
            json arr = json::array();
            for (const auto& v : p.values) arr.push_back(write_literal(v));
            return arr;
        }
        case Predicate::Kind::is_missing:
            return nullptr;
        case Predicate::Kind::negate:
            return json{{"not", write_predicate(p.inner.front())}};
    }
    return nullptr;
}

json write_measure(const MeasureSpec& m) {
    json out = json::object();
    if (!m.where.empty() || m.start || m.end) {
        json where = json::object();
        for (const auto& clause : m.where) where[clause.field] = write_predicate(clause.predicate);
        if (m.start) where["start"] = *m.start;
        if (m.end) where["end"] = *m.end;
        out["where"] = std::move(where);
    }
    if (m.op) out["operator"] = std::string(to_string(*m.op));
    if (!m.valid.empty()) {
        json valid = json::object();
        for (const auto& [field, values] : m.valid) {
            json arr = json::array();
            for (const auto& v : values) arr.push_back(write_literal(v));
            valid[field] = std::move(arr);
        }
        out["valid"] = std::move(valid);
    }
    if (m.field) out["field"] = *m.field;
    return out;
}

json write_metric(const MetricSpec& spec) {
    json out = json::object();
    out["metric"] = spec.metric;
    if (spec.desc) out["desc"] = *spec.desc;
    if (spec.xfield) out["data"] = json{{"xfield", *spec.xfield}};
    if (spec.mark) out["mark"] = std::string(to_string(*spec.mark));
    if (spec.chart) out["chart"] = std::string(to_string(*spec.chart));
    if (!spec.measures.empty()) {
        json filters = json::object();
        for (const auto& [name, m] : spec.measures) filters[name] = write_measure(m);
        out["yfilters"] = std::move(filters);
    }
    if (!spec.yaggregates.empty()) {
        json aggs = json::object();
        for (const auto& [name, rule] : spec.yaggregates) aggs[name] = std::string(to_string(rule));
        out["yaggregates"] = std::move(aggs);
    }
    if (spec.ylabel) out["ylabel"] = *spec.ylabel;
    if (!spec.legend.empty()) out["legend"] = spec.legend;

    const auto& sub = spec.subsidiary;
    if (!sub.categories.empty()) out["categories"] = sub.categories;
    if (!sub.quantities.empty()) {
        json arr = json::array();
        for (const auto& q : sub.quantities) {
            arr.push_back(json{{"field", q.field}, {"aggregate", std::string(to_string(q.aggregate))}});
        }
        out["quantities"] = std::move(arr);
    }
    if (!sub.times.empty()) {
        json times = json::object();
        for (const auto& [unit, measures] : sub.times) times[std::string(to_string(unit))] = measures;
        out["times"] = std::move(times);
    }
    if (sub.tspan) out["tspan"] = *sub.tspan;
    if (spec.event) {
        json event = json::object();
        event["name"] = spec.event->name;
        event["date"] = spec.event->date;
        if (!spec.event->desc.empty()) event["desc"] = spec.event->desc;
        event["id"] = spec.event->id;
        out["event"] = std::move(event);
    }
    return out;
}

/// nlohmann keeps the last of two equal keys; reject them instead so a
/// duplicated measure name never silently shadows the first one.
json parse_strict(std::string_view text) {
    std::vector<std::set<std::string>> scopes;
    std::string duplicate;
    auto callback = [&](int /*depth*/, json::parse_event_t event, json& parsed) {
        switch (event) {
            case json::parse_event_t::object_start:
                scopes.emplace_back();
                break;
            case json::parse_event_t::object_end:
                if (!scopes.empty()) scopes.pop_back();
                break;
            case json::parse_event_t::key:
                if (!scopes.empty() && !scopes.back().insert(parsed.get<std::string>()).second && duplicate.empty()) {
                    duplicate = parsed.get<std::string>();
                }
                break;
            default:
                break;
        }
        return true;
    };
    json doc;
    try {
        doc = json::parse(text.begin(), text.end(), callback);
    } catch (const json::parse_error& e) {
        throw ConfigError("SyntaxError", "", "byte " + std::to_string(e.byte) + ": " + e.what());
    }
    if (!duplicate.empty()) throw ConfigError("DuplicateKey", "", "key '" + duplicate + "' appears twice in one object");
    return doc;
}

}  // namespace

DashboardConfig parse_config(std::string_view text, std::vector<Diagnostic>* warnings) {
    return Reader(warnings).read(parse_strict(text));
}

std::string serialize_config(const DashboardConfig& config) {
    json doc = json::object();
    doc["audit"] = config.audit;
    doc["xfield"] = config.xfield;
    if (config.primary_key) doc["primary_key"] = *config.primary_key;
    if (!config.field_aliases.empty()) {
        json aliases = json::object();
        for (const auto& [header, canonical] : config.field_aliases) aliases[header] = canonical;
        doc["field_aliases"] = std::move(aliases);
    }
    json metrics = json::array();
    for (const auto& m : config.metrics) metrics.push_back(write_metric(m));
    doc["metrics"] = std::move(metrics);
    return doc.dump(2) + "\n";
}

}  // namespace qualdash::mss
