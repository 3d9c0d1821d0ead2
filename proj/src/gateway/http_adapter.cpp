#include "ec/gateway/http_adapter.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace ec::gateway {

HttpModelAdapter::HttpModelAdapter(std::string base_url, std::string model, std::string api_key,
                                   std::chrono::milliseconds timeout)
    : model_(std::move(model)), api_key_(std::move(api_key)), timeout_(timeout) {
  const auto scheme_end = base_url.find("://");
  if (scheme_end == std::string::npos) throw Error("BadConfig", "model_url needs a scheme: " + base_url);
  const auto path_start = base_url.find('/', scheme_end + 3);
  scheme_host_ = base_url.substr(0, path_start);
  path_prefix_ = path_start == std::string::npos ? "" : base_url.substr(path_start);
  while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (scheme_host_.rfind("https://", 0) == 0)
    throw Error("BadConfig", "this build has no TLS support; use an http:// model_url");
#endif
}

std::vector<std::string> HttpModelAdapter::complete(const pipeline::PromptRequest& request, std::size_t n) {
  httplib::Client client(scheme_host_);
  if (timeout_.count() > 0) {
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_write_timeout(timeout_);
  }
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
  nlohmann::json body = {{"model", model_},
                         {"n", n},
                         {"messages", {{{"role", "user"}, {"content", request.text}}}}};
  auto res = client.Post(path_prefix_ + "/chat/completions", headers, body.dump(), "application/json");
  if (!res) {
    if (res.error() == httplib::Error::ConnectionTimeout || res.error() == httplib::Error::Read)
      throw pipeline::AdapterTimeout("model endpoint did not answer in time");
    throw Error("AdapterHttpError", "request to model endpoint failed: " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300)
    throw Error("AdapterHttpError", "model endpoint returned HTTP " + std::to_string(res->status));
  std::vector<std::string> out;
  try {
    const auto j = nlohmann::json::parse(res->body);
    for (const auto& choice : j.at("choices")) out.push_back(choice.at("message").at("content").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw Error("AdapterHttpError", std::string("malformed completion body: ") + e.what());
  }
  // Some endpoints ignore n; ask again for the remainder one at a time.
  while (out.size() < n) {
    body["n"] = 1;
    auto more = client.Post(path_prefix_ + "/chat/completions", headers, body.dump(), "application/json");
    if (!more || more->status < 200 || more->status >= 300)
      throw Error("AdapterHttpError", "model endpoint failed while topping up completions");
    try {
      out.push_back(nlohmann::json::parse(more->body).at("choices").at(0).at("message").at("content").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw Error("AdapterHttpError", std::string("malformed completion body: ") + e.what());
    }
  }
  out.resize(n);
  return out;
}

}  // namespace ec::gateway
