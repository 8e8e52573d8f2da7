// Request handling for the dashboard API, independent of any HTTP library.
//
//   GET  /audits
//   GET  /dashboard/{audit}?from&to&granularity
//   GET  /card/{audit}/{metric}?state=entry|expanded&subview&tab&from&to&granularity
//   POST /card/{audit}/{metric}/brush     body: selection
//   POST /card/{audit}/{metric}/export    body: selection -> text/csv
//   POST /logs                            body: usage-log entry
//   POST /admin/reload
//
// {metric} is a metric title or its slug. Dates are ISO `YYYY-MM-DD`.
#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qualdash/cardgen/card.hpp"
#include "qualdash/server/config.hpp"
#include "qualdash/server/generation.hpp"
#include "qualdash/server/usage_log.hpp"

namespace qualdash::server {

struct Request {
    std::string method;
    std::string path;  // percent-decoded
    std::map<std::string, std::string> query;
    std::string body;
};

struct Response {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
    std::vector<std::pair<std::string, std::string>> headers;

    std::optional<std::string> header(std::string_view name) const;
};

class DashboardService {
public:
    /// Loads the first generation. Throws AuditLoadError when an audit does
    /// not load.
    explicit DashboardService(ServerConfig config);

    Response handle(const Request& request);

    Response audits() const;
    Response dashboard(const std::string& audit, const std::map<std::string, std::string>& query) const;
    Response card(const std::string& audit, const std::string& metric,
                  const std::map<std::string, std::string>& query) const;
    Response brush(const std::string& audit, const std::string& metric, const std::map<std::string, std::string>& query,
                   const std::string& body) const;
    Response export_records(const std::string& audit, const std::string& metric,
                            const std::map<std::string, std::string>& query, const std::string& body) const;
    Response append_log(const std::string& body);
    /// Rebuilds every audit from disk. On failure the live generation stays
    /// in place and the report is returned with status 422.
    Response reload();

    std::shared_ptr<const Generation> generation() const;
    const ServerConfig& config() const { return config_; }

private:
    struct Resolved;
    std::optional<Response> resolve(const Generation& gen, const std::string& audit, const std::string& metric,
                                    const std::map<std::string, std::string>& query, Resolved& out) const;

    ServerConfig config_;
    mutable std::mutex generation_mutex_;
    std::shared_ptr<const Generation> generation_;
    std::mutex reload_mutex_;
    std::uint64_t next_id_ = 1;
    UsageLog log_;
};

/// Default timeframe: the latest calendar year holding data, or the current
/// year when the audit has none.
cardgen::Timeframe default_timeframe(const AuditState& audit);

/// The config-level time field unless the metric names its own.
std::string metric_xfield(const mss::DashboardConfig& config, const mss::MetricSpec& spec);

/// Card inputs for one metric of a loaded audit.
cardgen::CardContext make_context(const AuditState& audit, const mss::MetricSpec& spec, cardgen::Timeframe tf,
                                  cardgen::Granularity g, aggregate::IntervalConvention convention);

}  // namespace qualdash::server
