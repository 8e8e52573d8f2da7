#include "qualdash/server/http.hpp"

#include <stdexcept>
#include <thread>

#include "httplib.h"

namespace qualdash::server {

bool client_allowed(const ServerConfig& config, std::string_view remote_addr) {
    if (is_loopback(remote_addr)) return true;
    for (const auto& prefix : config.allow) {
        if (!prefix.empty() && remote_addr.starts_with(prefix)) return true;
    }
    return false;
}

struct HttpServer::Impl {
    explicit Impl(DashboardService& s) : service(s) {}

    void serve(const httplib::Request& req, httplib::Response& res) {
        if (!client_allowed(service.config(), req.remote_addr)) {
            res.status = 403;
            res.set_content(R"({"error":"client address not permitted"})", "application/json");
            return;
        }
        Request r;
        r.method = req.method;
        r.path = req.path;
        for (const auto& [k, v] : req.params) r.query.emplace(k, v);
        r.body = req.body;
        const Response out = service.handle(r);
        res.status = out.status;
        for (const auto& [k, v] : out.headers) res.set_header(k, v);
        if (!out.content_type.empty()) res.set_content(out.body, out.content_type);
    }

    DashboardService& service;
    httplib::Server server;
    std::thread thread;
};

HttpServer::HttpServer(DashboardService& service) : impl_(std::make_unique<Impl>(service)) {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) { impl_->serve(req, res); };
    impl_->server.Get(".*", handler);
    impl_->server.Post(".*", handler);
    impl_->server.Put(".*", handler);
    impl_->server.Delete(".*", handler);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::start(const std::string& host, int port) {
    int bound = port;
    if (port == 0) {
        bound = impl_->server.bind_to_any_port(host);
    } else if (!impl_->server.bind_to_port(host, port)) {
        bound = -1;
    }
    if (bound < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return bound;
}

void HttpServer::wait() {
    if (impl_->thread.joinable()) impl_->thread.join();
}

void HttpServer::stop() {
    if (!impl_) return;
    impl_->server.stop();
    wait();
}

}  // namespace qualdash::server
