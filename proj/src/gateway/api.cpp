#include "ec/gateway/api.hpp"

#include <regex>

#include "ec/gateway/http_adapter.hpp"
#include "ec/lower.hpp"
#include "ec/pipeline.hpp"
#include "ec/problems.hpp"
#include "ec/scripted_adapter.hpp"

namespace ec::gateway {

using nlohmann::ordered_json;

namespace {

ApiResponse ok(ordered_json body, int status = 200) { return {status, std::move(body)}; }

nlohmann::json parse_body(const std::string& body) {
  if (body.empty()) return nlohmann::json::object();
  try {
    return nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw Error("BadRequest", std::string("request body is not valid JSON: ") + e.what());
  }
}

}  // namespace

int status_for(const std::string& code) {
  static const std::map<std::string, int> table = {
      {"SessionNotFound", 404},  {"NotFound", 404},          {"SessionExpired", 410},
      {"SessionBusy", 409},      {"ValidationFailed", 422},  {"DimensionMismatch", 422},
      {"InfeasibleSpec", 422},   {"NegativeInput", 422},     {"BadBounds", 422},
      {"UnknownKind", 422},      {"BadRequest", 400},        {"Unauthorized", 401},
      {"MethodNotAllowed", 405}, {"AdapterTimeout", 504},    {"AdapterHttpError", 502},
      {"AdapterContract", 502},  {"ScriptMissingRole", 502}, {"BadScript", 502},
  };
  auto it = table.find(code);
  return it == table.end() ? 500 : it->second;
}

ApiResponse error_response(const std::exception& e) {
  ordered_json err;
  std::string code = "InternalError";
  if (const auto* ee = dynamic_cast<const Error*>(&e)) code = ee->code();
  err["code"] = code;
  err["message"] = e.what();
  if (const auto* ve = dynamic_cast<const ValidationError*>(&e)) {
    err["details"] = ordered_json::array();
    for (const auto& i : ve->issues()) err["details"].push_back({{"field", i.field}, {"message", i.message}});
  } else if (const auto* pe = dynamic_cast<const problems::ParamError*>(&e)) {
    err["details"] = ordered_json::array();
    for (const auto& f : pe->fields()) err["details"].push_back({{"field", f}, {"message", e.what()}});
  }
  return {status_for(code), ordered_json{{"error", err}}};
}

std::shared_ptr<pipeline::ModelAdapter> make_adapter(const GatewayConfig& cfg) {
  if (cfg.adapter == "scripted")
    return std::make_shared<pipeline::ScriptedAdapter>(pipeline::ScriptedAdapter::from_file(cfg.script));
  if (cfg.adapter == "http")
    return std::make_shared<HttpModelAdapter>(cfg.model_url, cfg.model_name, cfg.api_key, cfg.pipeline.adapter_timeout);
  return std::make_shared<pipeline::ScriptedAdapter>(pipeline::offline_adapter());
}

ordered_json message_view(const pipeline::Session& s, const std::string& reply) {
  ordered_json j;
  j["session_id"] = s.id;
  j["reply"] = reply;
  j["phase"] = pipeline::to_string(s.phase);
  j["kind"] = s.kind ? ordered_json(problems::to_string(*s.kind)) : ordered_json(nullptr);
  if (s.phase == pipeline::Phase::Eliciting && s.kind) {
    const auto schema_json = problems::to_json(problems::schema(*s.kind));
    ordered_json qs = ordered_json::array();
    for (const auto& name : s.pending)
      for (const auto& spec : schema_json.at("params"))
        if (spec.at("name") == name) qs.push_back(spec);
    j["questions"] = qs;
  }
  if (s.result) {
    const auto& r = *s.result;
    ordered_json sol;
    sol["status"] = lp::to_string(r.solution.status);
    sol["objective"] = r.solution.objective ? ordered_json(*r.solution.objective) : ordered_json(nullptr);
    sol["variables"] = pipeline::variables_json(*s.kind, r.instance, r.solution);
    sol["report"] = pipeline::report_json(r.report);
    sol["document"] = r.document;
    j["solution"] = sol;
    j["explanation"] = r.explanation_model.value_or(r.explanation_template);
    j["explanation_fallback"] = r.explanation_fallback;
  }
  if (s.failure_code) {
    std::size_t debug = 0;
    for (const auto& t : s.traces) debug = std::max(debug, t.debug_iterations);
    j["failure"] = {{"code", *s.failure_code},
                    {"message", s.failure_message.value_or("")},
                    {"samples", s.traces.size()},
                    {"debug_iterations", debug}};
  }
  return j;
}

Api::Api(GatewayConfig cfg, std::shared_ptr<pipeline::ModelAdapter> adapter)
    : cfg_(std::move(cfg)),
      adapter_(std::move(adapter)),
      store_(cfg_.data_dir, std::chrono::seconds(cfg_.session_ttl_seconds)) {}

ApiResponse Api::create_session() { return ok({{"session_id", store_.create()}}, 201); }

ApiResponse Api::post_message(const std::string& id, const nlohmann::json& body) {
  if (!body.is_object() || !body.contains("text") || !body.at("text").is_string())
    throw Error("BadRequest", "expected a JSON body {\"text\": \"...\"}");
  auto lease = store_.acquire(id);
  auto& s = lease.session();
  const auto before = s.phase;
  const std::string reply = pipeline::respond(s, body.at("text").get<std::string>(), *adapter_, cfg_.pipeline);
  lease.commit();
  if (before != s.phase && !s.traces.empty() && pipeline::is_terminal(s.phase)) store_.append_traces(s);
  return ok(message_view(s, reply));
}

ApiResponse Api::get_session(const std::string& id) { return ok(pipeline::to_json(store_.get(id))); }

ApiResponse Api::schemas() { return ok(problems::all_schemas_json()); }

ApiResponse Api::solve(const nlohmann::json& body) {
  if (!body.is_object() || !body.contains("kind") || !body.at("kind").is_string() || !body.contains("params"))
    throw Error("BadRequest", "expected a JSON body {\"kind\": \"...\", \"params\": {...}}");
  const auto kind = problems::parse_kind(body.at("kind").get<std::string>());
  if (!kind) throw Error("UnknownKind", "unknown problem kind '" + body.at("kind").get<std::string>() + "'");
  return ok(pipeline::direct_solve_json(problems::params_from_json(*kind, body.at("params"))));
}

ApiResponse Api::healthz() { return ok({{"status", "ok"}, {"adapter", adapter_->name()}}); }

ApiResponse Api::handle(const std::string& method, const std::string& path, const std::string& body,
                        const std::string& authorization) {
  static const std::regex session_re(R"(^/v1/sessions/([A-Za-z0-9_-]+)$)");
  static const std::regex message_re(R"(^/v1/sessions/([A-Za-z0-9_-]+)/messages$)");
  try {
    if (path != "/v1/healthz" && !cfg_.bearer_token.empty() && authorization != "Bearer " + cfg_.bearer_token)
      throw Error("Unauthorized", "missing or wrong bearer token");
    std::smatch m;
    if (path == "/v1/healthz") {
      if (method == "GET") return healthz();
    } else if (path == "/v1/schemas") {
      if (method == "GET") return schemas();
    } else if (path == "/v1/sessions") {
      if (method == "POST") return create_session();
    } else if (path == "/v1/solve") {
      if (method == "POST") return solve(parse_body(body));
    } else if (std::regex_match(path, m, message_re)) {
      if (method == "POST") return post_message(m[1].str(), parse_body(body));
    } else if (std::regex_match(path, m, session_re)) {
      if (method == "GET") return get_session(m[1].str());
    } else {
      throw Error("NotFound", "no route for " + path);
    }
    throw Error("MethodNotAllowed", method + " is not supported on " + path);
  } catch (const std::exception& e) {
    return error_response(e);
  }
}

}  // namespace ec::gateway
