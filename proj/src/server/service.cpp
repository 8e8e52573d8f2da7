#include "qualdash/server/service.hpp"

#include <algorithm>
#include <chrono>

#include "qualdash/aggregate/filter.hpp"
#include "qualdash/cardgen/brush.hpp"
#include "qualdash/cardgen/export.hpp"
#include "qualdash/dataio/io.hpp"
#include "qualdash/mss/validate.hpp"

namespace qualdash::server {

using aggregate::Json;
using cardgen::CardError;
using Query = std::map<std::string, std::string>;

namespace {

Response json_response(int status, const Json& body) {
    Response r;
    r.status = status;
    r.body = body.dump();
    return r;
}

Response error(int status, const std::string& message) { return json_response(status, Json{{"error", message}}); }

std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < path.size()) {
        while (i < path.size() && path[i] == '/') ++i;
        const std::size_t j = path.find('/', i);
        const std::size_t end = j == std::string::npos ? path.size() : j;
        if (end > i) out.push_back(path.substr(i, end - i));
        i = end;
    }
    return out;
}

std::optional<std::string> param(const Query& q, const std::string& key) {
    auto it = q.find(key);
    if (it == q.end() || it->second.empty()) return std::nullopt;
    return it->second;
}

/// Timeframe from `from`/`to`, each defaulting to the audit's latest year.
std::variant<cardgen::Timeframe, std::string> timeframe_of(const AuditState& audit, const Query& q) {
    cardgen::Timeframe tf = default_timeframe(audit);
    if (auto from = param(q, "from")) {
        auto d = dataio::parse_date(*from);
        if (!d) return "from is not a date: " + *from;
        tf.from = *d;
    }
    if (auto to = param(q, "to")) {
        auto d = dataio::parse_date(*to);
        if (!d) return "to is not a date: " + *to;
        tf.to = *d;
    }
    if (tf.to < tf.from) return "from (" + dataio::format_date(tf.from) + ") is after to (" + dataio::format_date(tf.to) + ")";
    return tf;
}

std::variant<cardgen::Granularity, std::string> granularity_of(const Query& q) {
    auto g = param(q, "granularity");
    if (!g) return cardgen::Granularity::month;
    auto parsed = mss::parse_granularity(*g);
    if (!parsed) return "granularity must be day, month, quarter or year";
    return *parsed;
}

Json report_json(const mss::ValidationReport& report) {
    auto diags = [](const std::vector<mss::Diagnostic>& ds) {
        Json out = Json::array();
        for (const auto& d : ds) out.push_back(Json{{"path", d.path}, {"code", d.code}, {"message", d.message}});
        return out;
    };
    return Json{{"ok", report.ok()}, {"errors", diags(report.errors)}, {"warnings", diags(report.warnings)}};
}

std::string content_disposition_name(std::string s) {
    std::replace_if(s.begin(), s.end(), [](char c) { return c == '"' || c == '\\' || c == '/'; }, '_');
    return s;
}

}  // namespace

std::optional<std::string> Response::header(std::string_view name) const {
    for (const auto& [k, v] : headers) {
        if (k == name) return v;
    }
    return std::nullopt;
}

cardgen::Timeframe default_timeframe(const AuditState& audit) {
    int year;
    if (!audit.years.empty()) {
        year = audit.years.back();
    } else {
        const auto today = std::chrono::floor<std::chrono::days>(std::chrono::system_clock::now());
        year = dataio::year_of(today);
    }
    return cardgen::Timeframe::year(year);
}

std::string metric_xfield(const mss::DashboardConfig& config, const mss::MetricSpec& spec) {
    return spec.xfield ? *spec.xfield : config.xfield;
}

cardgen::CardContext make_context(const AuditState& audit, const mss::MetricSpec& spec, cardgen::Timeframe tf,
                                  cardgen::Granularity g, aggregate::IntervalConvention convention) {
    return cardgen::CardContext{spec,          *audit.table, metric_xfield(audit.config, spec), tf, audit.config.primary_key,
                                g,             convention};
}

DashboardService::DashboardService(ServerConfig config)
    : config_(std::move(config)), log_(config_.log_path, config_.fsync) {
    generation_ = load_generation(config_, next_id_++);
}

std::shared_ptr<const Generation> DashboardService::generation() const {
    std::lock_guard lock(generation_mutex_);
    return generation_;
}

Response DashboardService::handle(const Request& req) {
    const auto parts = split_path(req.path);
    try {
        if (parts.size() == 1 && parts[0] == "audits") {
            if (req.method != "GET") return error(405, "use GET");
            return audits();
        }
        if (parts.size() == 2 && parts[0] == "dashboard") {
            if (req.method != "GET") return error(405, "use GET");
            return dashboard(parts[1], req.query);
        }
        if (parts.size() == 3 && parts[0] == "card") {
            if (req.method != "GET") return error(405, "use GET");
            return card(parts[1], parts[2], req.query);
        }
        if (parts.size() == 4 && parts[0] == "card" && (parts[3] == "brush" || parts[3] == "export")) {
            if (req.method != "POST") return error(405, "use POST");
            return parts[3] == "brush" ? brush(parts[1], parts[2], req.query, req.body)
                                       : export_records(parts[1], parts[2], req.query, req.body);
        }
        if (parts.size() == 1 && parts[0] == "logs") {
            if (req.method != "POST") return error(405, "use POST");
            return append_log(req.body);
        }
        if (parts.size() == 2 && parts[0] == "admin" && parts[1] == "reload") {
            if (req.method != "POST") return error(405, "use POST");
            return reload();
        }
        return error(404, "no such endpoint: " + req.path);
    } catch (const CardError& e) {
        return error(400, e.what());
    } catch (const aggregate::AggregateError& e) {
        return error(400, e.what());
    } catch (const std::exception& e) {
        return error(500, e.what());
    }
}

Response DashboardService::audits() const {
    const auto gen = generation();
    Json list = Json::array();
    for (const auto& a : gen->audits) {
        Json metrics = Json::array();
        for (const auto& m : a->config.metrics) metrics.push_back(Json{{"title", m.metric}, {"slug", mss::slugify(m.metric)}});
        list.push_back(Json{{"audit", a->config.audit},
                            {"rows", a->table->row_count()},
                            {"years", a->years},
                            {"metrics", std::move(metrics)}});
    }
    return json_response(200, Json{{"generation", gen->id}, {"audits", std::move(list)}});
}

Response DashboardService::dashboard(const std::string& audit_name, const Query& query) const {
    const auto gen = generation();
    const AuditState* audit = gen->find(audit_name);
    if (!audit) return error(404, "unknown audit '" + audit_name + "'");
    auto tf = timeframe_of(*audit, query);
    if (auto* msg = std::get_if<std::string>(&tf)) return error(400, *msg);
    auto g = granularity_of(query);
    if (auto* msg = std::get_if<std::string>(&g)) return error(400, *msg);
    const auto timeframe = std::get<cardgen::Timeframe>(tf);

    Json cards = Json::array();
    std::vector<std::string> fields;
    auto note = [&](const std::string& f) {
        if (std::find(fields.begin(), fields.end(), f) == fields.end()) fields.push_back(f);
    };
    for (const auto& spec : audit->config.metrics) {
        const auto ctx = make_context(*audit, spec, timeframe, std::get<cardgen::Granularity>(g), config_.interval_convention);
        cards.push_back(cardgen::card_to_json(cardgen::build_card(ctx, cardgen::CardState::entry)));
        for (const auto& f : mss::measure_fields(spec)) note(f);
        for (const auto& f : spec.subsidiary.categories) note(f);
        for (const auto& q : spec.subsidiary.quantities) note(q.field);
    }
    Json dictionary = Json::object();
    for (const auto& f : fields) {
        if (const auto* info = audit->table->schema().find(f)) {
            dictionary[f] = Json{{"type", std::string(mss::to_string(info->type))}, {"description", info->description}};
        }
    }
    return json_response(200, Json{{"audit", audit->config.audit},
                                   {"generation", gen->id},
                                   {"timeframe",
                                    Json{{"from", dataio::format_date(timeframe.from)},
                                         {"to", dataio::format_date(timeframe.to)}}},
                                   {"cards", std::move(cards)},
                                   {"dictionary", std::move(dictionary)}});
}

struct DashboardService::Resolved {
    const AuditState* audit = nullptr;
    const mss::MetricSpec* spec = nullptr;
    cardgen::Timeframe timeframe;
    cardgen::Granularity granularity = cardgen::Granularity::month;
};

std::optional<Response> DashboardService::resolve(const Generation& gen, const std::string& audit_name,
                                                  const std::string& metric, const Query& query, Resolved& out) const {
    out.audit = gen.find(audit_name);
    if (!out.audit) return error(404, "unknown audit '" + audit_name + "'");
    out.spec = out.audit->config.find_metric(metric);
    if (!out.spec) return error(404, "unknown metric '" + metric + "'");
    auto tf = timeframe_of(*out.audit, query);
    if (auto* msg = std::get_if<std::string>(&tf)) return error(400, *msg);
    auto g = granularity_of(query);
    if (auto* msg = std::get_if<std::string>(&g)) return error(400, *msg);
    out.timeframe = std::get<cardgen::Timeframe>(tf);
    out.granularity = std::get<cardgen::Granularity>(g);
    return std::nullopt;
}

Response DashboardService::card(const std::string& audit, const std::string& metric, const Query& query) const {
    const auto gen = generation();
    Resolved r;
    if (auto err = resolve(*gen, audit, metric, query, r)) return *err;
    const auto ctx = make_context(*r.audit, *r.spec, r.timeframe, r.granularity, config_.interval_convention);

    auto subview = param(query, "subview");
    auto tab = param(query, "tab");
    if (subview || tab) {
        if (!subview || !tab) return error(400, "a tab request needs both subview and tab");
        return json_response(200, cardgen::build_tab(ctx, *subview, *tab));
    }
    auto state = cardgen::CardState::expanded;
    if (auto s = param(query, "state")) {
        auto parsed = cardgen::parse_card_state(*s);
        if (!parsed) return error(400, "state must be entry or expanded");
        state = *parsed;
    }
    return json_response(200, cardgen::card_to_json(cardgen::build_card(ctx, state)));
}

Response DashboardService::brush(const std::string& audit, const std::string& metric, const Query& query,
                                 const std::string& body) const {
    const auto gen = generation();
    Resolved r;
    if (auto err = resolve(*gen, audit, metric, query, r)) return *err;
    Json payload = Json::object();
    if (!body.empty()) {
        try {
            payload = Json::parse(body);
        } catch (const Json::parse_error& e) {
            return error(400, std::string("malformed brush: ") + e.what());
        }
    }
    aggregate::Selection selection;
    try {
        selection = aggregate::selection_from_json(payload);
    } catch (const aggregate::AggregateError& e) {
        return error(400, std::string("malformed brush: ") + e.what());
    }
    const auto ctx = make_context(*r.audit, *r.spec, r.timeframe, r.granularity, config_.interval_convention);
    return json_response(200, cardgen::linked_update_to_json(cardgen::resolve_brush(ctx, selection)));
}

Response DashboardService::export_records(const std::string& audit, const std::string& metric, const Query& query,
                                          const std::string& body) const {
    const auto gen = generation();
    Resolved r;
    if (auto err = resolve(*gen, audit, metric, query, r)) return *err;
    aggregate::Selection selection;
    try {
        selection = aggregate::selection_from_json(body.empty() ? Json::object() : Json::parse(body));
    } catch (const std::exception& e) {
        return error(400, std::string("malformed selection: ") + e.what());
    }
    if (selection.empty()) return error(400, "nothing is selected to export");
    const auto ctx = make_context(*r.audit, *r.spec, r.timeframe, r.granularity, config_.interval_convention);
    const auto table = cardgen::export_selection(ctx, selection, dataio::utc_timestamp());

    Response resp;
    resp.content_type = "text/csv";
    resp.body = cardgen::export_to_csv(table);
    const std::string file = content_disposition_name(r.audit->config.audit + "-" + mss::slugify(r.spec->metric)) + ".csv";
    resp.headers.emplace_back("Content-Disposition", "attachment; filename=\"" + file + "\"");
    resp.headers.emplace_back("X-Selection-Count", std::to_string(table.rows.size()));
    resp.headers.emplace_back("X-Export-Timestamp", table.timestamp);
    return resp;
}

Response DashboardService::append_log(const std::string& body) {
    Json entry;
    try {
        entry = Json::parse(body);
    } catch (const Json::parse_error& e) {
        return error(400, std::string("log entry is not JSON: ") + e.what());
    }
    if (auto problem = check_log_entry(entry)) {
        const char* kind = problem->kind == LogRejection::privacy ? "privacy" : "schema";
        return json_response(400, Json{{"error", problem->reason}, {"rejected_by", kind}});
    }
    if (!log_.append(entry.dump())) return error(507, "usage log is unavailable");
    Response r;
    r.status = 204;
    r.content_type.clear();
    return r;
}

Response DashboardService::reload() {
    std::lock_guard serial(reload_mutex_);
    std::shared_ptr<const Generation> fresh;
    try {
        fresh = load_generation(config_, next_id_);
    } catch (const AuditLoadError& e) {
        Json body = report_json(e.report());
        body["generation"] = generation()->id;
        return json_response(422, body);
    }
    ++next_id_;
    mss::ValidationReport merged;
    for (const auto& a : fresh->audits) {
        for (const auto& w : a->report.warnings) merged.warnings.push_back(w);
    }
    {
        std::lock_guard lock(generation_mutex_);
        generation_ = fresh;
    }
    Json body = report_json(merged);
    body["generation"] = fresh->id;
    return json_response(200, body);
}

}  // namespace qualdash::server
