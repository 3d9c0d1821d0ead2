#include "ec/gateway/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

extern char** environ;

namespace ec::gateway {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

bool known_key(const std::string& k) {
  return std::find(std::begin(kConfigKeys), std::end(kConfigKeys), k) != std::end(kConfigKeys);
}

long to_long(const std::string& key, const std::string& v, long lo, long hi) {
  long out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || out < lo || out > hi)
    throw Error("BadConfig", key + " must be an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return out;
}

}  // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error("BadConfig", "line " + std::to_string(n) + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key == "api_key") throw Error("BadConfig", "the API key is read from EC_API_KEY only, never from files");
    if (!known_key(key)) throw Error("BadConfig", "line " + std::to_string(n) + ": unknown key '" + key + "'");
    out[key] = value;
  }
  return out;
}

std::map<std::string, std::string> process_environment() {
  std::map<std::string, std::string> env;
  for (char** e = environ; e && *e; ++e) {
    std::string kv = *e;
    if (kv.rfind("EC_", 0) != 0) continue;
    const auto eq = kv.find('=');
    if (eq != std::string::npos) env[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return env;
}

GatewayConfig resolve_config(const std::optional<std::filesystem::path>& file,
                             const std::map<std::string, std::string>& env,
                             const std::map<std::string, std::string>& flags) {
  std::map<std::string, std::string> merged;
  if (file) {
    std::ifstream f(*file);
    if (!f) throw Error("BadConfig", "cannot read config file " + file->string());
    std::stringstream ss;
    ss << f.rdbuf();
    merged = parse_config_text(ss.str());
  }
  for (const char* key : kConfigKeys) {
    std::string var = "EC_";
    for (const char* c = key; *c; ++c) var += static_cast<char>(std::toupper(static_cast<unsigned char>(*c)));
    if (auto it = env.find(var); it != env.end()) merged[key] = it->second;
  }
  for (const auto& [k, v] : flags) {
    if (!known_key(k)) throw Error("BadConfig", "unknown setting '" + k + "'");
    merged[k] = v;
  }

  GatewayConfig cfg;
  auto get = [&](const char* k) -> const std::string* {
    auto it = merged.find(k);
    return it == merged.end() ? nullptr : &it->second;
  };
  if (auto v = get("host")) cfg.host = *v;
  if (auto v = get("port")) cfg.port = static_cast<int>(to_long("port", *v, 0, 65535));
  if (auto v = get("data_dir")) cfg.data_dir = *v;
  if (auto v = get("adapter")) cfg.adapter = *v;
  if (auto v = get("script")) cfg.script = *v;
  if (auto v = get("model_url")) cfg.model_url = *v;
  if (auto v = get("model_name")) cfg.model_name = *v;
  if (auto v = get("bearer_token")) cfg.bearer_token = *v;
  if (auto v = get("ui_dir")) cfg.ui_dir = *v;
  if (auto v = get("cors_origin")) cfg.cors_origin = *v;
  if (auto v = get("prompts_dir")) cfg.prompts_dir = *v;
  if (auto v = get("samples")) cfg.pipeline.samples = static_cast<std::size_t>(to_long("samples", *v, 1, 8));
  if (auto v = get("max_debug")) cfg.pipeline.max_debug = static_cast<std::size_t>(to_long("max_debug", *v, 0, 20));
  if (auto v = get("adapter_timeout_ms"))
    cfg.pipeline.adapter_timeout = std::chrono::milliseconds(to_long("adapter_timeout_ms", *v, 0, 3600000));
  if (auto v = get("session_ttl_seconds"))
    cfg.session_ttl_seconds = to_long("session_ttl_seconds", *v, 1, 365L * 86400);
  if (auto it = env.find("EC_API_KEY"); it != env.end()) cfg.api_key = it->second;

  if (cfg.adapter != "offline" && cfg.adapter != "scripted" && cfg.adapter != "http")
    throw Error("BadConfig", "adapter must be offline, scripted or http");
  if (cfg.adapter == "scripted" && cfg.script.empty())
    throw Error("BadConfig", "the scripted adapter needs a script path");
  if (!cfg.prompts_dir.empty()) cfg.pipeline.prompts = pipeline::PromptSet::with_overrides(cfg.prompts_dir);
  cfg.pipeline.check();
  return cfg;
}

}  // namespace ec::gateway
