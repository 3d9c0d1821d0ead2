#include "ec/gateway/http_server.hpp"

#include <httplib.h>

namespace ec::gateway {

struct HttpServer::Impl {
  Api& api;
  httplib::Server server;
  explicit Impl(Api& a) : api(a) {}
};

HttpServer::HttpServer(Api& api) : impl_(std::make_unique<Impl>(api)) {
  auto& srv = impl_->server;
  const auto& cfg = api.config();
  const std::string origin = cfg.cors_origin;

  srv.set_default_headers({{"Access-Control-Allow-Origin", origin},
                           {"Access-Control-Allow-Headers", "Content-Type, Authorization"},
                           {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});

  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    const auto out = impl_->api.handle(req.method, req.path, req.body, req.get_header_value("Authorization"));
    res.status = out.status;
    res.set_content(out.body.dump(), "application/json");
  };
  srv.Get(R"(/v1/.*)", route);
  srv.Post(R"(/v1/.*)", route);
  srv.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  if (!cfg.ui_dir.empty() && !srv.set_mount_point("/", cfg.ui_dir.string()))
    throw Error("BadConfig", "ui_dir does not exist: " + cfg.ui_dir.string());
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  auto& srv = impl_->server;
  const int bound = port == 0 ? srv.bind_to_any_port(host) : (srv.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error("BindFailed", "cannot listen on " + host + ":" + std::to_string(port));
  return bound;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace ec::gateway
