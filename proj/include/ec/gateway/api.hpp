#pragma once

// Transport-independent JSON API. The HTTP server and the CLI both call into
// this layer, so every route can be tested without sockets.

#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "ec/adapter.hpp"
#include "ec/direct_solve.hpp"
#include "ec/gateway/config.hpp"
#include "ec/gateway/session_store.hpp"
#include "ec/params.hpp"

namespace ec::gateway {

struct ApiResponse {
  int status = 200;
  nlohmann::ordered_json body;
};

/// HTTP status for an error code (404 SessionNotFound, 422 validation,
/// 504 AdapterTimeout, ...).
int status_for(const std::string& code);

/// {"error": {"code", "message", "details"?}} with the matching status.
ApiResponse error_response(const std::exception& e);

/// Adapter named by the config: offline replies, a script file or an
/// OpenAI-compatible endpoint.
std::shared_ptr<pipeline::ModelAdapter> make_adapter(const GatewayConfig& cfg);

class Api {
 public:
  Api(GatewayConfig cfg, std::shared_ptr<pipeline::ModelAdapter> adapter);

  ApiResponse create_session();
  ApiResponse post_message(const std::string& id, const nlohmann::json& body);
  ApiResponse get_session(const std::string& id);
  ApiResponse schemas();
  ApiResponse solve(const nlohmann::json& body);
  ApiResponse healthz();

  /// Routes a request. `authorization` is the raw Authorization header.
  ApiResponse handle(const std::string& method, const std::string& path, const std::string& body,
                     const std::string& authorization = {});

  const GatewayConfig& config() const noexcept { return cfg_; }
  SessionStore& store() noexcept { return store_; }

 private:
  GatewayConfig cfg_;
  std::shared_ptr<pipeline::ModelAdapter> adapter_;
  SessionStore store_;
};

/// The message endpoint's view of a session: reply, phase, pending questions,
/// solution and explanation.
nlohmann::ordered_json message_view(const pipeline::Session& s, const std::string& reply);

}  // namespace ec::gateway
