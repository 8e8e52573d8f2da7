#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qualdash/aggregate/series.hpp"

namespace qualdash::server {

class ServerConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Where one audit's configuration and data live. Relative paths are
/// resolved against the server config file's directory.
struct AuditSource {
    std::string config;
    std::string dictionary;
    std::optional<std::string> derivations;
    std::optional<std::string> aliases;  // JSON object: external header -> field
    std::vector<std::string> data;       // CSV files
    std::optional<std::string> data_dir; // every *.csv inside, sorted by name

    friend bool operator==(const AuditSource&, const AuditSource&) = default;
};

struct ServerConfig {
    std::string bind = "127.0.0.1";
    int port = 8080;
    std::string log_path = "qualdash-usage.ndjson";
    bool fsync = false;
    aggregate::IntervalConvention interval_convention = aggregate::IntervalConvention::half_open;
    /// Client address prefixes admitted besides loopback.
    std::vector<std::string> allow;
    std::vector<AuditSource> audits;

    friend bool operator==(const ServerConfig&, const ServerConfig&) = default;
};

/// Throws ServerConfigError on malformed JSON or missing keys.
ServerConfig parse_server_config(std::string_view text, const std::string& base_dir = ".");
ServerConfig load_server_config(const std::string& path);

/// QUALDASH_BIND accepts `host` or `host:port`.
void apply_env_overrides(ServerConfig& config);

/// Path of the config file named by QUALDASH_CONFIG, if set.
std::optional<std::string> env_config_path();

bool is_loopback(std::string_view address);

}  // namespace qualdash::server
