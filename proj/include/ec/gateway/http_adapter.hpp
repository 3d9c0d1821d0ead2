#pragma once

// ModelAdapter for OpenAI-compatible chat-completion endpoints.

#include <chrono>
#include <string>

#include "ec/adapter.hpp"

namespace ec::gateway {

class HttpModelAdapter : public pipeline::ModelAdapter {
 public:
  /// `base_url` like "https://api.openai.com/v1" or "http://localhost:8000/v1".
  HttpModelAdapter(std::string base_url, std::string model, std::string api_key,
                   std::chrono::milliseconds timeout);

  /// One POST to {base_url}/chat/completions asking for n choices.
  /// Throws AdapterTimeout on connection timeouts and Error("AdapterHttpError")
  /// for transport failures, non-2xx replies and malformed bodies.
  std::vector<std::string> complete(const pipeline::PromptRequest& request, std::size_t n) override;
  std::string name() const override { return "http:" + model_; }

 private:
  std::string scheme_host_;
  std::string path_prefix_;
  std::string model_;
  std::string api_key_;
  std::chrono::milliseconds timeout_;
};

}  // namespace ec::gateway
