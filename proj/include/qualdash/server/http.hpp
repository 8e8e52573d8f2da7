#pragma once

#include <memory>
#include <string>

#include "qualdash/server/service.hpp"

namespace qualdash::server {

/// Client admission: loopback always, otherwise an `allow` prefix match.
bool client_allowed(const ServerConfig& config, std::string_view remote_addr);

/// HTTP front end for a DashboardService.
class HttpServer {
public:
    explicit HttpServer(DashboardService& service);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds and serves on a background thread. Port 0 picks a free port.
    /// Returns the bound port; throws std::runtime_error when binding fails.
    int start(const std::string& host, int port);
    /// Blocks until stop() is called from elsewhere.
    void wait();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace qualdash::server
