#include "qualdash/server/config.hpp"

#include <cstdlib>
#include <filesystem>

#include "json.hpp"
#include "qualdash/dataio/io.hpp"

namespace qualdash::server {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string resolve(const std::string& base, const std::string& p) {
    if (p.empty() || fs::path(p).is_absolute()) return p;
    return (fs::path(base) / p).lexically_normal().string();
}

std::string required(const json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) throw ServerConfigError(where + ": '" + key + "' must be a string");
    return it->get<std::string>();
}

}  // namespace

ServerConfig parse_server_config(std::string_view text, const std::string& base_dir) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ServerConfigError(std::string("server config: ") + e.what());
    }
    if (!doc.is_object()) throw ServerConfigError("server config must be a JSON object");
    ServerConfig cfg;
    try {
        cfg.bind = doc.value("bind", cfg.bind);
        cfg.port = doc.value("port", cfg.port);
        cfg.log_path = resolve(base_dir, doc.value("log_path", cfg.log_path));
        cfg.fsync = doc.value("fsync", cfg.fsync);
        const std::string conv = doc.value("interval_convention", std::string("half_open"));
        if (conv == "half_open") {
            cfg.interval_convention = aggregate::IntervalConvention::half_open;
        } else if (conv == "inclusive") {
            cfg.interval_convention = aggregate::IntervalConvention::inclusive;
        } else {
            throw ServerConfigError("interval_convention must be half_open or inclusive");
        }
        cfg.allow = doc.value("allow", std::vector<std::string>{});
        for (const auto& a : doc.value("audits", json::array())) {
            const std::string where = "audit entry";
            if (!a.is_object()) throw ServerConfigError("each audit entry must be an object");
            AuditSource src;
            src.config = resolve(base_dir, required(a, "config", where));
            src.dictionary = resolve(base_dir, required(a, "dictionary", where));
            if (a.contains("derivations")) src.derivations = resolve(base_dir, required(a, "derivations", where));
            if (a.contains("aliases")) src.aliases = resolve(base_dir, required(a, "aliases", where));
            if (a.contains("data_dir")) src.data_dir = resolve(base_dir, required(a, "data_dir", where));
            for (const auto& d : a.value("data", std::vector<std::string>{})) src.data.push_back(resolve(base_dir, d));
            cfg.audits.push_back(std::move(src));
        }
    } catch (const json::exception& e) {
        throw ServerConfigError(std::string("server config: ") + e.what());
    }
    if (cfg.port < 0 || cfg.port > 65535) throw ServerConfigError("port out of range");
    return cfg;
}

ServerConfig load_server_config(const std::string& path) {
    std::string text;
    try {
        text = dataio::read_file(path);
    } catch (const std::exception& e) {
        throw ServerConfigError(e.what());
    }
    const auto parent = fs::path(path).parent_path();
    return parse_server_config(text, parent.empty() ? "." : parent.string());
}

void apply_env_overrides(ServerConfig& config) {
    const char* bind = std::getenv("QUALDASH_BIND");
    if (!bind || !*bind) return;
    std::string value = bind;
    const auto colon = value.rfind(':');
    if (colon != std::string::npos && value.find(':') == colon) {
        try {
            config.port = std::stoi(value.substr(colon + 1));
        } catch (const std::exception&) {
            throw ServerConfigError("QUALDASH_BIND port is not a number: " + value);
        }
        value = value.substr(0, colon);
    }
    config.bind = value;
}

std::optional<std::string> env_config_path() {
    const char* p = std::getenv("QUALDASH_CONFIG");
    if (!p || !*p) return std::nullopt;
    return std::string(p);
}

bool is_loopback(std::string_view address) {
    return address == "localhost" || address == "::1" || address.starts_with("127.") ||
           address.starts_with("::ffff:127.");
}

}  // namespace qualdash::server
