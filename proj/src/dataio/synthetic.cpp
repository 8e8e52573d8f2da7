#include "qualdash/dataio/synthetic.hpp"

#include <cmath>
#include <random>

#include "json.hpp"

namespace qualdash::dataio {

namespace detail {
extern const std::string_view kPicanetProfile;
extern const std::string_view kMinapProfile;
}  // namespace detail

namespace {

using json = nlohmann::ordered_json;

SyntheticColumn* find_column(SyntheticProfile& profile, std::string_view name) {
    for (auto& c : profile.columns) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

void check_rate(double rate, std::string_view what) {
    if (!(rate >= 0.0 && rate <= 1.0)) throw DataError(std::string(what) + " rate must lie in [0, 1]");
}

/// Uniform draws built directly on the engine's output, so generated files
/// do not depend on the standard library's distribution implementations.
class Draws {
public:
    explicit Draws(std::uint64_t seed) : engine_(seed) {}

    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    long long between(long long lo, long long hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<long long>(engine_() % span);
    }

    double normal(double mean, double sd) {
        const double u1 = 1.0 - unit();  // (0, 1]
        const double u2 = unit();
        return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    std::size_t weighted(const std::vector<double>& weights) {
        double total = 0;
        for (double w : weights) total += w;
        double x = unit() * total;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (x < weights[i]) return i;
            x -= weights[i];
        }
        return weights.size() - 1;
    }

private:
    std::mt19937_64 engine_;
};

mss::Literal literal_from(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_number()) return v.get<double>();
    throw DataError("invalid code must be a scalar");
}

json literal_to(const mss::Literal& lit) {
    return std::visit([](const auto& v) { return json(v); }, lit);
}

Value literal_value(const mss::Literal& lit, mss::FieldType type) {
    if (type == mss::FieldType::quantitative) {
        if (const auto* d = std::get_if<double>(&lit)) return *d;
        throw DataError("numeric column needs numeric invalid codes");
    }
    return mss::literal_text(lit);
}

}  // namespace

void SyntheticProfile::set_missing(std::string_view column, double rate) {
    check_rate(rate, "missingness");
    auto* c = find_column(*this, column);
    if (!c) throw DataError("profile has no column '" + std::string(column) + "'");
    c->missing = rate;
}

void SyntheticProfile::set_invalid(std::string_view column, double rate) {
    check_rate(rate, "invalid-code");
    auto* c = find_column(*this, column);
    if (!c) throw DataError("profile has no column '" + std::string(column) + "'");
    c->invalid = rate;
}

SyntheticProfile parse_profile(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
        SyntheticProfile p;
        p.name = doc.at("name").get<std::string>();
        p.start = doc.value("start", p.start);
        p.end = doc.value("end", p.end);
        for (const auto& c : doc.at("columns")) {
            SyntheticColumn col;
            col.name = c.at("name").get<std::string>();
            auto type = mss::parse_field_type(c.at("type").get<std::string>());
            if (!type) throw DataError("column '" + col.name + "' has an unknown type");
            col.type = *type;
            col.description = c.value("description", col.name);
            col.missing = c.value("missing", 0.0);
            col.invalid = c.value("invalid", 0.0);
            check_rate(col.missing, "missingness");
            check_rate(col.invalid, "invalid-code");
            if (auto it = c.find("invalid_codes"); it != c.end()) {
                for (const auto& v : *it) col.invalid_codes.push_back(literal_from(v));
            }
            const json& g = c.at("gen");
            auto& gen = col.generator;
            gen.kind = g.at("kind").get<std::string>();
            gen.prefix = g.value("prefix", "");
            gen.base = g.value("base", "");
            gen.min_days = g.value("min_days", 0);
            gen.max_days = g.value("max_days", 0);
            gen.values = g.value("values", std::vector<std::string>{});
            gen.weights = g.value("weights", std::vector<double>{});
            gen.distribution = g.value("distribution", "uniform");
            gen.min = g.value("min", 0.0);
            gen.max = g.value("max", 1.0);
            gen.mean = g.value("mean", 0.0);
            gen.sd = g.value("sd", 1.0);
            gen.decimals = g.value("decimals", 2);
            gen.p = g.value("p", 0.5);
            p.columns.push_back(std::move(col));
        }
        return p;
    } catch (const json::exception& e) {
        throw DataError(std::string("profile: ") + e.what());
    }
}

std::string serialize_profile(const SyntheticProfile& p) {
    json doc = json::object();
    doc["name"] = p.name;
    doc["start"] = p.start;
    doc["end"] = p.end;
    json cols = json::array();
    for (const auto& c : p.columns) {
        const auto& g = c.generator;
        json gen = json::object();
        gen["kind"] = g.kind;
        if (g.kind == "id") gen["prefix"] = g.prefix;
        if (g.kind == "date_after") {
            gen["base"] = g.base;
            gen["min_days"] = g.min_days;
            gen["max_days"] = g.max_days;
        }
        if (g.kind == "category") {
            gen["values"] = g.values;
            gen["weights"] = g.weights;
        }
        if (g.kind == "number") {
            gen["distribution"] = g.distribution;
            gen["mean"] = g.mean;
            gen["sd"] = g.sd;
            gen["min"] = g.min;
            gen["max"] = g.max;
            gen["decimals"] = g.decimals;
        }
        if (g.kind == "boolean") gen["p"] = g.p;
        json col = {{"name", c.name},
                    {"type", std::string(mss::to_string(c.type))},
                    {"description", c.description},
                    {"gen", gen}};
        if (c.missing > 0) col["missing"] = c.missing;
        if (c.invalid > 0) col["invalid"] = c.invalid;
        if (!c.invalid_codes.empty()) {
            json codes = json::array();
            for (const auto& lit : c.invalid_codes) codes.push_back(literal_to(lit));
            col["invalid_codes"] = codes;
        }
        cols.push_back(std::move(col));
    }
    doc["columns"] = std::move(cols);
    return doc.dump(2) + "\n";
}

SyntheticProfile builtin_profile(std::string_view name) {
    if (name == "picanet") return parse_profile(detail::kPicanetProfile);
    if (name == "minap") return parse_profile(detail::kMinapProfile);
    throw DataError("no built-in profile named '" + std::string(name) + "'");
}

std::vector<std::string> builtin_profile_names() { return {"picanet", "minap"}; }

DataTable generate_synthetic(std::uint64_t seed, std::int64_t n, const SyntheticProfile& profile) {
    if (n < 0) throw DataError("row count must be non-negative");
    const auto start = parse_date(profile.start);
    const auto end = parse_date(profile.end);
    if (!start || !end || *end < *start) throw DataError("profile date range is invalid");

    // resolve date_after bases to earlier column indices
    std::vector<std::size_t> bases(profile.columns.size(), 0);
    std::vector<mss::FieldInfo> fields;
    for (std::size_t c = 0; c < profile.columns.size(); ++c) {
        const auto& col = profile.columns[c];
        const auto& g = col.generator;
        if (g.kind == "date_after") {
            bool found = false;
            for (std::size_t b = 0; b < c; ++b) {
                if (profile.columns[b].name == g.base) {
                    bases[c] = b;
                    found = true;
                }
            }
            if (!found) throw DataError("column '" + col.name + "' is based on '" + g.base + "', which is not an earlier column");
        }
        if (g.kind == "category" && (g.values.empty() || g.values.size() != g.weights.size())) {
            throw DataError("category column '" + col.name + "' needs matching values and weights");
        }
        if (col.invalid > 0 && col.invalid_codes.empty() && g.kind != "date_after") {
            throw DataError("column '" + col.name + "' has an invalid rate but no invalid codes");
        }
        fields.push_back(mss::FieldInfo{col.name, col.type, col.description});
    }

    Draws draws(seed);
    const long long span = (*end - *start).count();
    const int width = std::max<int>(6, static_cast<int>(std::to_string(n).size()));
    std::vector<Record> rows;
    rows.reserve(static_cast<std::size_t>(n));
    for (std::int64_t r = 0; r < n; ++r) {
        Record rec(profile.columns.size());
        for (std::size_t c = 0; c < profile.columns.size(); ++c) {
            const auto& col = profile.columns[c];
            const auto& g = col.generator;
            const double miss_roll = draws.unit();
            const double invalid_roll = draws.unit();
            const bool missing = miss_roll < col.missing;
            const bool invalid = !missing && invalid_roll < col.invalid;

            Value v;
            if (g.kind == "id") {
                std::string id = std::to_string(r + 1);
                v = g.prefix + std::string(static_cast<std::size_t>(std::max<int>(0, width - static_cast<int>(id.size()))), '0') + id;
            } else if (g.kind == "date") {
                v = *start + std::chrono::days{draws.between(0, span)};
            } else if (g.kind == "date_after") {
                const long long offset = draws.between(g.min_days, g.max_days);
                const long long back = draws.between(1, 5);
                if (auto base = as_date(rec[bases[c]])) {
                    v = *base + std::chrono::days{invalid ? -back : offset};
                }
            } else if (g.kind == "category") {
                v = g.values[draws.weighted(g.weights)];
            } else if (g.kind == "number") {
                double x = g.distribution == "normal" ? draws.normal(g.mean, g.sd) : g.min + draws.unit() * (g.max - g.min);
                x = std::clamp(x, g.min, g.max);
                const double scale = std::pow(10.0, g.decimals);
                v = std::round(x * scale) / scale;
            } else if (g.kind == "boolean") {
                v = draws.unit() < g.p;
            } else {
                throw DataError("unknown generator kind '" + g.kind + "'");
            }
            if (invalid && g.kind != "date_after" && !col.invalid_codes.empty()) {
                v = literal_value(col.invalid_codes[draws.weighted(std::vector<double>(col.invalid_codes.size(), 1.0))],
                                  col.type);
            }
            if (missing) v = Missing{};
            rec[c] = std::move(v);
        }
        rows.push_back(std::move(rec));
    }
    Provenance prov;
    prov.source = "synthetic:" + profile.name + ":seed=" + std::to_string(seed);
    return DataTable(mss::DataDictionary(std::move(fields)), std::move(rows), std::move(prov));
}

}  // namespace qualdash::dataio
