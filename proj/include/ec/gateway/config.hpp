#pragma once

// Gateway settings. Sources, strongest first: command-line flags, EC_*
// environment variables, a key = value config file, built-in defaults.
//
// Keys: host, port, data_dir, adapter (offline | scripted | http), script,
// model_url, model_name, bearer_token, ui_dir, cors_origin, prompts_dir,
// samples, max_debug, adapter_timeout_ms, session_ttl_seconds.
// The model API key is read from EC_API_KEY only.

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "ec/pipeline.hpp"

namespace ec::gateway {

struct GatewayConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path data_dir;  // empty keeps sessions in memory only
  std::string adapter = "offline";
  std::filesystem::path script;
  std::string model_url = "https://api.openai.com/v1";
  std::string model_name = "gpt-4";
  std::string api_key;
  std::string bearer_token;  // empty disables the check
  std::filesystem::path ui_dir;
  std::string cors_origin = "*";
  std::filesystem::path prompts_dir;
  long session_ttl_seconds = 86400;
  pipeline::PipelineConfig pipeline;
};

inline const char* const kConfigKeys[] = {
    "host",     "port",         "data_dir", "adapter",     "script",      "model_url",  "model_name",
    "bearer_token", "ui_dir",   "cors_origin", "prompts_dir", "samples", "max_debug", "adapter_timeout_ms",
    "session_ttl_seconds"};

/// Parses "key = value" lines; '#' starts a comment. Throws Error("BadConfig")
/// for unknown keys, malformed lines and any attempt to store the API key.
std::map<std::string, std::string> parse_config_text(const std::string& text);

/// Merges the sources and converts values. `env` maps variable names to
/// values (pass the process environment in production, a fixture in tests).
GatewayConfig resolve_config(const std::optional<std::filesystem::path>& file,
                             const std::map<std::string, std::string>& env,
                             const std::map<std::string, std::string>& flags);

/// The process environment restricted to EC_* variables.
std::map<std::string, std::string> process_environment();

}  // namespace ec::gateway
