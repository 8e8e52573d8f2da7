#pragma once

#include <stdexcept>
#include <string>

namespace qualdash::mss {

/// Raised when a configuration or dictionary document cannot be loaded at
/// all. `path` is a JSON-pointer-like location inside the document.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string code, std::string path, const std::string& message)
        : std::runtime_error(path + ": " + code + ": " + message),
          code_(std::move(code)),
          path_(std::move(path)),
          message_(message) {}

    const std::string& code() const noexcept { return code_; }
    const std::string& path() const noexcept { return path_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::string code_;
    std::string path_;
    std::string message_;
};

}  // namespace qualdash::mss
