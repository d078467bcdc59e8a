#pragma once

#include "quakedss/service.hpp"

#include <memory>
#include <string>

namespace quakedss::service {

// Thin HTTP front for Service. Every request is handed to Service::handle.
class HttpServer {
public:
    explicit HttpServer(Service& service);
    ~HttpServer();

    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    // Port 0 picks a free port. Returns the bound port, or -1.
    int bind(const std::string& host, int port);
    // Blocks until stop() is called.
    bool run();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// "host:port" or ":port" or "port".
std::pair<std::string, int> parse_listen_address(const std::string& text);

} // namespace quakedss::service
