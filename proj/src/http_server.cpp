#include "quakedss/http_server.hpp"

#include "quakedss/error.hpp"

#include <httplib.h>

namespace quakedss::service {

struct HttpServer::Impl {
    Service& service;
    httplib::Server server;

    explicit Impl(Service& s) : service(s) {}

    void dispatch(const httplib::Request& req, httplib::Response& res) {
        Request r;
        r.method = req.method;
        r.path = req.path;
        for (const auto& [k, v] : req.params) r.query.emplace(k, v);
        r.body = req.body;
        auto auth = req.get_header_value("Authorization");
        if (auth.rfind("Bearer ", 0) == 0) r.token = trim(auth.substr(7));
        else r.token = req.get_header_value("X-Auth-Token");

        auto out = service.handle(r);
        res.status = out.status;
        res.set_header("X-Log-Sequence", out.body.value("log_seq", json(0)).dump());
        res.set_content(out.body.dump(), "application/json");
    }
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {
    auto handler = [this](const httplib::Request& req, httplib::Response& res) { impl_->dispatch(req, res); };
    impl_->server.Get(".*", handler);
    impl_->server.Post(".*", handler);
    impl_->server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr) {
        res.status = 500;
        res.set_content(R"({"error":"Internal"})", "application/json");
    });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0) return impl_->server.bind_to_any_port(host);
    return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::run() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
    if (impl_->server.is_running()) impl_->server.stop();
}

std::pair<std::string, int> parse_listen_address(const std::string& text) {
    auto colon = text.rfind(':');
    std::string host = colon == std::string::npos ? "" : text.substr(0, colon);
    std::string port_text = colon == std::string::npos ? text : text.substr(colon + 1);
    if (host.empty()) host = "127.0.0.1";
    try {
        std::size_t used = 0;
        int port = std::stoi(port_text, &used);
        if (used != port_text.size() || port < 0 || port > 65535) throw std::out_of_range("port");
        return {host, port};
    } catch (const std::exception&) {
        throw Error(ErrorCode::MalformedValue, "listen", text);
    }
}

} // namespace quakedss::service
