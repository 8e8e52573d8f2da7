#include "qualdash/dataio/transform.hpp"

#include <chrono>
#include <cmath>
#include <optional>

#include "json.hpp"

namespace qualdash::dataio {

Expr Expr::equals(std::string field, mss::Literal v) {
    Expr e;
    e.op = Op::equals;
    e.field = std::move(field);
    e.values.push_back(std::move(v));
    return e;
}

Expr Expr::in(std::string field, std::vector<mss::Literal> vs) {
    Expr e;
    e.op = Op::in;
    e.field = std::move(field);
    e.values = std::move(vs);
    return e;
}

Expr Expr::is_missing(std::string field) {
    Expr e;
    e.op = Op::is_missing;
    e.field = std::move(field);
    return e;
}

Expr Expr::negate(Expr inner) {
    Expr e;
    e.op = Op::negate;
    e.args.push_back(std::move(inner));
    return e;
}

Expr Expr::all_of(std::vector<Expr> es) {
    Expr e;
    e.op = Op::all_of;
    e.args = std::move(es);
    return e;
}

Expr Expr::any_of(std::vector<Expr> es) {
    Expr e;
    e.op = Op::any_of;
    e.args = std::move(es);
    return e;
}

Expr Expr::date_diff_days(std::string end, std::string start) {
    Expr e;
    e.op = Op::date_diff_days;
    e.field = std::move(end);
    e.other = std::move(start);
    return e;
}

DataTable normalize_dates(const DataTable& table, const std::vector<std::string>& date_fields) {
    std::vector<std::size_t> cols;
    for (const auto& f : date_fields) {
        const std::size_t c = table.require_column(f);
        if (table.schema().fields()[c].type != mss::FieldType::temporal) {
            throw DataError("field '" + f + "' is not declared temporal");
        }
        cols.push_back(c);
    }
    Provenance prov = table.provenance();
    std::vector<Record> rows = table.rows();
    std::vector<std::size_t> failures(cols.size(), 0);
    for (auto& rec : rows) {
        for (std::size_t k = 0; k < cols.size(); ++k) {
            Value& v = rec[cols[k]];
            if (const auto* s = std::get_if<std::string>(&v)) {
                if (is_missing_token(*s)) {
                    v = Missing{};
                } else if (auto d = parse_date(*s)) {
                    v = *d;
                } else {
                    v = Missing{};
                    ++failures[k];
                }
            } else if (const auto* n = std::get_if<double>(&v)) {
                using namespace std::chrono;
                v = floor<days>(sys_seconds{seconds{static_cast<long long>(std::floor(*n))}});
            } else if (!std::holds_alternative<Date>(v)) {
                v = Missing{};
            }
        }
    }
    for (std::size_t k = 0; k < cols.size(); ++k) {
        if (!failures[k]) continue;
        prov.unparseable += failures[k];
        const std::string& name = table.schema().fields()[cols[k]].name;
        bool merged = false;
        for (auto& [field, count] : prov.unparseable_by_field) {
            if (field == name) {
                count += failures[k];
                merged = true;
            }
        }
        if (!merged) prov.unparseable_by_field.emplace_back(name, failures[k]);
    }
    return DataTable(table.schema(), std::move(rows), std::move(prov));
}

namespace {

/// Expression with field names resolved to column indices.
struct Bound {
    Expr::Op op;
    std::size_t col = 0;
    std::size_t other = 0;
    bool boolean_field = false;
    const std::vector<mss::Literal>* values = nullptr;
    std::vector<Bound> args;
};

Bound bind_expr(const Expr& e, const std::vector<mss::FieldInfo>& fields, bool top_level) {
    auto lookup = [&](const std::string& name) -> std::size_t {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (fields[i].name == name) return i;
        }
        throw DataError("derived expression references unknown field '" + name + "'");
    };
    Bound b;
    b.op = e.op;
    switch (e.op) {
        case Expr::Op::equals:
        case Expr::Op::in:
        case Expr::Op::is_missing:
            b.col = lookup(e.field);
            b.boolean_field = fields[b.col].type == mss::FieldType::boolean;
            b.values = &e.values;
            break;
        case Expr::Op::negate:
            if (e.args.size() != 1) throw DataError("not takes exactly one operand");
            b.args.push_back(bind_expr(e.args.front(), fields, false));
            break;
        case Expr::Op::all_of:
        case Expr::Op::any_of:
            for (const auto& a : e.args) b.args.push_back(bind_expr(a, fields, false));
            break;
        case Expr::Op::date_diff_days:
            if (!top_level) throw DataError("date_diff_days cannot be nested inside a boolean expression");
            b.col = lookup(e.field);
            b.other = lookup(e.other);
            if (fields[b.col].type != mss::FieldType::temporal || fields[b.other].type != mss::FieldType::temporal) {
                throw DataError("date_diff_days needs two temporal fields");
            }
            break;
    }
    return b;
}

bool eval_bool(const Bound& b, const Record& rec) {
    switch (b.op) {
        case Expr::Op::equals:
        case Expr::Op::in: {
            Value v = rec[b.col];
            if (b.boolean_field && is_missing(v)) v = false;
            for (const auto& lit : *b.values) {
                if (matches_literal(v, lit)) return true;
            }
            return false;
        }
        case Expr::Op::is_missing:
            return is_missing(rec[b.col]);
        case Expr::Op::negate:
            return !eval_bool(b.args.front(), rec);
        case Expr::Op::all_of:
            for (const auto& a : b.args) {
                if (!eval_bool(a, rec)) return false;
            }
            return true;
        case Expr::Op::any_of:
            for (const auto& a : b.args) {
                if (eval_bool(a, rec)) return true;
            }
            return false;
        case Expr::Op::date_diff_days:
            break;
    }
    return false;
}

Value eval_top(const Bound& b, const Record& rec) {
    if (b.op != Expr::Op::date_diff_days) return eval_bool(b, rec);
    auto end = as_date(rec[b.col]);
    auto start = as_date(rec[b.other]);
    if (!end || !start) return Missing{};
    return static_cast<double>((*end - *start).count());
}

std::string describe(const Expr& e) {
    auto join = [](const std::vector<Expr>& args, const char* sep) {
        std::string out = "(";
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (i) out += sep;
            out += describe(args[i]);
        }
        return out + ")";
    };
    switch (e.op) {
        case Expr::Op::equals:
            return e.field + " = " + mss::literal_text(e.values.front());
        case Expr::Op::in: {
            std::string out = e.field + " in [";
            for (std::size_t i = 0; i < e.values.size(); ++i) out += (i ? ", " : "") + mss::literal_text(e.values[i]);
            return out + "]";
        }
        case Expr::Op::is_missing:
            return e.field + " is missing";
        case Expr::Op::negate:
            return "not " + describe(e.args.front());
        case Expr::Op::all_of:
            return join(e.args, " and ");
        case Expr::Op::any_of:
            return join(e.args, " or ");
        case Expr::Op::date_diff_days:
            return "days from " + e.other + " to " + e.field;
    }
    return {};
}

}  // namespace

DataTable derive_fields(const DataTable& table, const std::vector<DerivedFieldSpec>& specs) {
    std::vector<mss::FieldInfo> fields = table.schema().fields();
    std::vector<Record> rows = table.rows();
    Provenance prov = table.provenance();

    for (const auto& spec : specs) {
        for (const auto& f : fields) {
            if (f.name == spec.name) throw DataError("derived field '" + spec.name + "' collides with an existing field");
        }
        const Bound bound = bind_expr(spec.expression, fields, true);
        for (auto& rec : rows) rec.push_back(eval_top(bound, rec));

        mss::FieldInfo info;
        info.name = spec.name;
        info.type = spec.expression.is_boolean() ? mss::FieldType::boolean : mss::FieldType::quantitative;
        info.description = spec.description.empty() ? "Derived: " + describe(spec.expression) : spec.description;
        fields.push_back(std::move(info));
        prov.derived_columns.push_back(spec.name);
    }
    return DataTable(mss::DataDictionary(std::move(fields)), std::move(rows), std::move(prov));
}

DataTable rederive_fields(const DataTable& table, const std::vector<DerivedFieldSpec>& specs) {
    DataTable base = table;
    for (const auto& spec : specs) {
        if (base.column(spec.name)) base = base.drop_column(spec.name);
    }
    return derive_fields(base, specs);
}

namespace {

using json = nlohmann::ordered_json;

mss::Literal literal_from(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_number()) return v.get<double>();
    throw DataError("expected a string, number or boolean literal, got " + v.dump());
}

Expr expr_from(const json& j) {
    if (!j.is_object()) throw DataError("expression must be an object, got " + j.dump());
    if (auto it = j.find("and"); it != j.end() || j.contains("or")) {
        const bool conj = it != j.end();
        const json& args = conj ? *it : j.at("or");
        if (!args.is_array()) throw DataError("and/or expects an array");
        std::vector<Expr> es;
        for (const auto& a : args) es.push_back(expr_from(a));
        return conj ? Expr::all_of(std::move(es)) : Expr::any_of(std::move(es));
    }
    if (auto it = j.find("not"); it != j.end()) return Expr::negate(expr_from(*it));
    if (auto it = j.find("date_diff_days"); it != j.end()) {
        if (!it->is_array() || it->size() != 2 || !(*it)[0].is_string() || !(*it)[1].is_string()) {
            throw DataError("date_diff_days expects [end_field, start_field]");
        }
        return Expr::date_diff_days((*it)[0].get<std::string>(), (*it)[1].get<std::string>());
    }
    auto field = j.find("field");
    if (field == j.end() || !field->is_string()) throw DataError("predicate needs a field: " + j.dump());
    const std::string name = field->get<std::string>();
    if (auto it = j.find("equals"); it != j.end()) return Expr::equals(name, literal_from(*it));
    if (auto it = j.find("in"); it != j.end()) {
        if (!it->is_array()) throw DataError("in expects an array");
        std::vector<mss::Literal> vs;
        for (const auto& v : *it) vs.push_back(literal_from(v));
        return Expr::in(name, std::move(vs));
    }
    if (j.contains("is_missing")) return Expr::is_missing(name);
    throw DataError("unrecognised predicate: " + j.dump());
}

}  // namespace

std::vector<DerivedFieldSpec> parse_derivations(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw DataError(std::string("derivations: ") + e.what());
    }
    if (!doc.is_array()) throw DataError("derivations must be a JSON array");
    std::vector<DerivedFieldSpec> out;
    for (const auto& entry : doc) {
        if (!entry.is_object() || !entry.contains("name") || !entry.contains("expr")) {
            throw DataError("each derivation needs name and expr");
        }
        DerivedFieldSpec spec;
        spec.name = entry.at("name").get<std::string>();
        spec.expression = expr_from(entry.at("expr"));
        if (auto d = entry.find("description"); d != entry.end()) spec.description = d->get<std::string>();
        out.push_back(std::move(spec));
    }
    return out;
}

std::size_t AnnualPartition::total_rows() const {
    std::size_t n = undated.row_count();
    for (const auto& [year, t] : years) n += t.row_count();
    return n;
}

AnnualPartition split_annual(const DataTable& table, std::string_view date_field) {
    const std::size_t col = table.require_column(date_field);
    std::map<int, std::vector<std::size_t>> by_year;
    std::vector<std::size_t> undated;
    for (std::size_t r = 0; r < table.row_count(); ++r) {
        if (auto d = as_date(table.at(r, col))) {
            by_year[year_of(*d)].push_back(r);
        } else {
            undated.push_back(r);
        }
    }
    AnnualPartition out;
    for (const auto& [year, idx] : by_year) out.years.emplace(year, table.select_rows(idx));
    out.undated = table.select_rows(undated);
    return out;
}

}  // namespace qualdash::dataio
