#pragma once

// HTTP transport for Api: JSON routes under /v1, CORS headers, optional
// static files for a browser client.

#include <memory>
#include <string>

#include "ec/gateway/api.hpp"

namespace ec::gateway {

class HttpServer {
 public:
  explicit HttpServer(Api& api);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds host:port (port 0 picks a free one) and returns the bound port.
  /// Throws Error("BindFailed").
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ec::gateway
