#include "qualdash/aggregate/serialize.hpp"

namespace qualdash::aggregate {

Json bins_to_json(const std::vector<Bin>& bins) {
    Json out = Json::array();
    for (const auto& b : bins) {
        Json v = b.value ? Json(*b.value) : Json(nullptr);
        out.push_back(Json{{"bin", dataio::format_date(b.start)}, {"value", std::move(v)}});
    }
    return out;
}

Json series_to_json(const BinSeries& s) {
    return Json{{"measure", s.measure},
                {"granularity", std::string(mss::to_string(s.granularity))},
                {"rule", std::string(mss::to_string(s.rule))},
                {"records", s.records},
                {"bins", bins_to_json(s.bins)}};
}

Json distribution_to_json(const Distribution& d) {
    Json entries = Json::array();
    for (const auto& e : d.entries) entries.push_back(Json{{"value", e.value}, {"count", e.count}, {"share", e.share}});
    return Json{{"field", d.field}, {"total", d.total}, {"entries", std::move(entries)}};
}

Json quality_to_json(const QualityStats& q) {
    Json fields = Json::array();
    for (const auto& f : q.fields) {
        fields.push_back(Json{{"field", f.field},
                              {"missing", f.missing},
                              {"invalid", f.invalid},
                              {"valid", f.valid},
                              {"total", f.total}});
    }
    return Json{{"summary", q.summary()},
                {"metric_total", q.metric_total},
                {"records_with_missing", q.records_with_missing},
                {"records_with_invalid", q.records_with_invalid},
                {"fields", std::move(fields)}};
}

Selection selection_from_json(const Json& j) {
    if (!j.is_object()) throw AggregateError("selection must be a JSON object");
    Selection s;
    for (const auto& [key, value] : j.items()) {
        if (key == "granularity") {
            auto g = value.is_string() ? mss::parse_granularity(value.get<std::string>()) : std::nullopt;
            if (!g) throw AggregateError("selection granularity must be day, month, quarter or year");
            s.granularity = *g;
        } else if (key == "bins") {
            if (!value.is_array()) throw AggregateError("selection bins must be an array of dates");
            for (const auto& b : value) {
                auto d = b.is_string() ? dataio::parse_date(b.get<std::string>()) : std::nullopt;
                if (!d) throw AggregateError("selection bin " + b.dump() + " is not a date");
                s.bins.push_back(*d);
            }
        } else if (key == "category") {
            if (value.is_null()) continue;
            if (!value.is_object() || !value.contains("field") || !value.contains("value") ||
                !value["field"].is_string()) {
                throw AggregateError("selection category needs field and value");
            }
            const Json& v = value["value"];
            std::string text;
            if (v.is_string()) {
                text = v.get<std::string>();
            } else if (v.is_null()) {
                text = std::string(kMissingLabel);
            } else if (v.is_boolean()) {
                text = v.get<bool>() ? "true" : "false";
            } else if (v.is_number()) {
                text = dataio::format_number(v.get<double>());
            } else {
                throw AggregateError("selection category value must be a scalar");
            }
            s.category = CategoryValue{value["field"].get<std::string>(), std::move(text)};
        } else if (key == "ids") {
            if (!value.is_array()) throw AggregateError("selection ids must be an array of strings");
            for (const auto& id : value) {
                if (!id.is_string()) throw AggregateError("selection ids must be strings");
                s.record_ids.push_back(id.get<std::string>());
            }
        } else if (key == "measure") {
            if (value.is_null()) continue;
            if (!value.is_string()) throw AggregateError("selection measure must be a string");
            s.measure = value.get<std::string>();
        } else {
            throw AggregateError("unknown selection key '" + key + "'");
        }
    }
    return s;
}

Json selection_to_json(const Selection& s) {
    Json out = Json::object();
    if (!s.bins.empty()) {
        Json bins = Json::array();
        for (Date b : s.bins) bins.push_back(dataio::format_date(b));
        out["bins"] = std::move(bins);
        out["granularity"] = std::string(mss::to_string(s.granularity));
    }
    if (s.category) out["category"] = Json{{"field", s.category->field}, {"value", s.category->value}};
    if (!s.record_ids.empty()) out["ids"] = s.record_ids;
    if (s.measure) out["measure"] = *s.measure;
    return out;
}

}  // namespace qualdash::aggregate
