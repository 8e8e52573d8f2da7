#pragma once

#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

namespace qualdash::server {

/// Interaction kinds a client may report.
inline constexpr std::string_view kLogActions[] = {"expand", "brush", "tab_change", "export", "layout_change",
                                                   "download"};

enum class LogRejection { schema, privacy };

struct LogCheck {
    LogRejection kind;
    std::string reason;
};

/// Checks an entry against the log schema: `{timestamp, session, action,
/// metric?, detail?}`. Detail keys come from a fixed whitelist and carry
/// identifier-like strings, numbers or booleans only; keys that look like
/// record identifiers are rejected as a privacy violation wherever they
/// appear. Returns nullopt when the entry is acceptable.
std::optional<LogCheck> check_log_entry(const nlohmann::ordered_json& entry);

/// Newline-delimited JSON sink. Each entry is written with a single
/// append-mode write under a mutex, so concurrent appends never interleave.
class UsageLog {
public:
    UsageLog(std::string path, bool fsync);
    ~UsageLog();
    UsageLog(const UsageLog&) = delete;
    UsageLog& operator=(const UsageLog&) = delete;

    /// False when the file cannot be opened or written.
    bool append(std::string_view line);
    const std::string& path() const { return path_; }

private:
    bool open_locked();

    std::string path_;
    bool fsync_;
    int fd_ = -1;
    std::mutex mutex_;
};

}  // namespace qualdash::server
