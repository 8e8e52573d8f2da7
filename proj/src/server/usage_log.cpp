#include "qualdash/server/usage_log.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cerrno>

namespace qualdash::server {

using json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kDetailKeys[] = {
    "layout",       "subview",  "tab",   "granularity", "state",         "bin_count", "category_field",
    "selected",     "format",   "from",  "to",          "position",      "expanded",  "measure",
    "duration_ms",  "cleared"};

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

/// Keys naming a patient, a record or any other identifier.
bool identifying_key(std::string_view key) {
    const std::string k = lower(key);
    if (k == "id" || k == "ids" || k.ends_with("_id") || k.ends_with("_ids") || k.starts_with("id_")) return true;
    // camelCase ...Id / ...ID
    if (key.size() > 2 && (key.ends_with("Id") || key.ends_with("ID") || key.ends_with("Ids"))) return true;
    for (std::string_view word : {"patient", "record", "nhs", "mrn", "dob", "birth", "postcode", "name", "address"}) {
        if (k.find(word) != std::string::npos) return true;
    }
    return false;
}

bool token_like(std::string_view s, std::size_t max_len) {
    if (s.empty() || s.size() > max_len) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '-' || c == '.' || c == ':' || c == '+';
    });
}

std::optional<LogCheck> privacy_scan(const json& j) {
    if (j.is_object()) {
        for (const auto& [key, value] : j.items()) {
            if (identifying_key(key)) return LogCheck{LogRejection::privacy, "key '" + key + "' looks like a record identifier"};
            if (auto r = privacy_scan(value)) return r;
        }
    } else if (j.is_array()) {
        for (const auto& v : j) {
            if (auto r = privacy_scan(v)) return r;
        }
    }
    return std::nullopt;
}

LogCheck schema(std::string reason) { return LogCheck{LogRejection::schema, std::move(reason)}; }

}  // namespace

std::optional<LogCheck> check_log_entry(const json& entry) {
    if (!entry.is_object()) return schema("log entry must be a JSON object");
    if (auto r = privacy_scan(entry)) return r;

    for (const auto& [key, value] : entry.items()) {
        if (key != "timestamp" && key != "session" && key != "action" && key != "metric" && key != "detail") {
            return schema("unknown key '" + key + "'");
        }
    }
    auto ts = entry.find("timestamp");
    if (ts == entry.end() || !ts->is_string() || !token_like(ts->get<std::string>(), 40)) {
        return schema("timestamp must be an ISO-8601 string");
    }
    auto session = entry.find("session");
    if (session == entry.end() || !session->is_string() || !token_like(session->get<std::string>(), 128)) {
        return schema("session must be an opaque token");
    }
    auto action = entry.find("action");
    if (action == entry.end() || !action->is_string() ||
        std::find(std::begin(kLogActions), std::end(kLogActions), action->get<std::string>()) == std::end(kLogActions)) {
        return schema("action must be one of expand, brush, tab_change, export, layout_change, download");
    }
    if (auto metric = entry.find("metric"); metric != entry.end()) {
        if (!metric->is_string() || metric->get<std::string>().size() > 200) return schema("metric must be a string");
    }
    if (auto detail = entry.find("detail"); detail != entry.end()) {
        if (!detail->is_object()) return schema("detail must be an object");
        for (const auto& [key, value] : detail->items()) {
            if (std::find(std::begin(kDetailKeys), std::end(kDetailKeys), key) == std::end(kDetailKeys)) {
                return schema("detail key '" + key + "' is not permitted");
            }
            if (value.is_string()) {
                if (!token_like(value.get<std::string>(), 64)) return schema("detail '" + key + "' must not be free text");
            } else if (!value.is_number() && !value.is_boolean()) {
                return schema("detail '" + key + "' must be a scalar");
            }
        }
    }
    return std::nullopt;
}

UsageLog::UsageLog(std::string path, bool fsync) : path_(std::move(path)), fsync_(fsync) {}

UsageLog::~UsageLog() {
    if (fd_ >= 0) ::close(fd_);
}

bool UsageLog::open_locked() {
    if (fd_ >= 0) return true;
    fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0640);
    return fd_ >= 0;
}

bool UsageLog::append(std::string_view line) {
    std::string buf(line);
    buf.push_back('\n');
    std::lock_guard lock(mutex_);
    if (!open_locked()) return false;
    std::size_t done = 0;
    while (done < buf.size()) {
        const ssize_t n = ::write(fd_, buf.data() + done, buf.size() - done);
        if (n < 0) {
            if (errno == EINTR) continue;
            ::close(fd_);
            fd_ = -1;
            return false;
        }
        done += static_cast<std::size_t>(n);
    }
    if (fsync_) ::fsync(fd_);
    return true;
}

}  // namespace qualdash::server
