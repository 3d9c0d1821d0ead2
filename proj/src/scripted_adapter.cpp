#include "ec/scripted_adapter.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "ec/problems.hpp"
#include "ec/prompts.hpp"

namespace ec::pipeline {

namespace {

const nlohmann::json& pick(const nlohmann::json& list, std::size_t index) {
  if (!list.is_array()) return list;
  if (list.empty()) throw Error("BadScript", "empty reply list");
  return list[std::min(index, list.size() - 1)];
}

void check_entry(const nlohmann::json& e, const std::string& where) {
  if (e.is_string()) return;
  if (e.is_object() && (e.contains("timeout") || e.contains("text"))) return;
  throw Error("BadScript", where + ": entries must be strings or {\"timeout\": true}");
}

void check_list(const nlohmann::json& v, const std::string& where, bool nested) {
  if (!v.is_array()) {
    check_entry(v, where);
    return;
  }
  if (v.empty()) throw Error("BadScript", where + ": empty list");
  for (const auto& e : v) {
    if (nested && e.is_array()) check_list(e, where, false);
    else check_entry(e, where);
  }
}

bool contains(const std::string& hay, const char* needle) { return hay.find(needle) != std::string::npos; }

}  // namespace

std::string keyword_label(const std::string& query) {
  std::string q = query;
  std::transform(q.begin(), q.end(), q.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (contains(q, "heat pump")) return "heat_pump";
  if (contains(q, "battery") &&
      (contains(q, "size") || contains(q, "sizing") || contains(q, "how big") || contains(q, "how large")))
    return "battery_sizing";
  if (contains(q, "battery")) return "battery_dispatch";
  if (contains(q, " ev") || q.rfind("ev", 0) == 0 || contains(q, "electric vehicle") ||
      contains(q, "charging schedule") || contains(q, "car"))
    return "ev_charging";
  if (contains(q, "solar panel") || contains(q, "pv") || contains(q, "photovoltaic") || contains(q, "panel"))
    return "pv_sizing";
  if (contains(q, "thermostat") || contains(q, "hvac") || contains(q, "temperature") ||
      contains(q, "air condition"))
    return "hvac";
  if (contains(q, "optimi") || contains(q, "minimi") || contains(q, "schedule")) return "optimization";
  return "general";
}

ScriptedAdapter::ScriptedAdapter(nlohmann::json script) : script_(std::move(script)) {
  if (!script_.is_object()) throw Error("BadScript", "script must be a JSON object");
  for (const auto& [key, value] : script_.items()) {
    if (key == "user" || key == "description" || key == "kind" || key == "params" || key == "baselines") continue;
    auto role = parse_role(key);
    if (!role) throw Error("BadScript", "unknown script key '" + key + "'");
    if (*role == Role::Debug) {
      if (!value.is_object()) throw Error("BadScript", "debug must map sample index or \"*\" to replies");
      for (const auto& [k, v] : value.items()) check_list(v, "debug." + k, false);
    } else {
      check_list(value, key, *role == Role::Formulation);
    }
  }
}

ScriptedAdapter ScriptedAdapter::from_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error("ScriptMissing", "cannot open script " + path.string());
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("BadScript", path.string() + ": " + e.what());
  }
  return ScriptedAdapter(std::move(j));
}

std::vector<std::string> ScriptedAdapter::user_turns() const {
  std::vector<std::string> out;
  if (script_.contains("user"))
    for (const auto& u : script_.at("user")) out.push_back(u.get<std::string>());
  return out;
}

std::string ScriptedAdapter::reply(const PromptRequest& request, std::size_t sample) const {
  const std::string role = to_string(request.role);
  if (!script_.contains(role)) throw Error("ScriptMissingRole", "script has no '" + role + "' replies");
  const nlohmann::json& entries = script_.at(role);
  const nlohmann::json* entry = nullptr;
  switch (request.role) {
    case Role::Formulation:
      entry = &pick(entries, sample);
      break;
    case Role::Debug: {
      const std::string key = std::to_string(request.sample);
      const nlohmann::json* list = entries.contains(key) ? &entries.at(key)
                                   : entries.contains("*") ? &entries.at("*")
                                                           : nullptr;
      if (!list) throw Error("ScriptMissingRole", "script has no debug replies for sample " + key);
      entry = &pick(*list, request.iteration == 0 ? 0 : request.iteration - 1);
      break;
    }
    default:
      entry = &pick(entries, request.iteration);
      break;
  }
  if (entry->is_object()) {
    if (entry->value("timeout", false)) throw AdapterTimeout("scripted timeout for " + role);
    entry = &entry->at("text");
  }
  std::string text = entry->get<std::string>();

  std::map<std::string, std::string> subs = request.vars;
  if (text.find("{{golden}}") != std::string::npos) {
    auto kind_it = request.vars.find("kind");
    auto params_it = request.vars.find("params_json");
    if (kind_it == request.vars.end() || params_it == request.vars.end())
      throw Error("BadScript", "{{golden}} used in a prompt without kind/params");
    auto kind = problems::parse_kind(kind_it->second);
    if (!kind) throw Error("BadScript", "unknown kind '" + kind_it->second + "'");
    subs["golden"] = problems::golden_document(
        problems::params_from_json(*kind, nlohmann::json::parse(params_it->second)));
  }
  if (text.find("{{classify}}") != std::string::npos) {
    auto q = request.vars.find("query");
    subs["classify"] = keyword_label(q == request.vars.end() ? std::string() : q->second);
  }
  return render_template(text, subs);
}

ScriptedAdapter offline_adapter() {
  return ScriptedAdapter(nlohmann::json{
      {"description", "built-in offline replies"},
      {"classification", {"{{classify}}"}},
      {"elicitation", {"To work this out I need a few numbers."}},
      {"formulation", {"```ecdsl\n{{golden}}```"}},
      {"debug", {{"*", {"```ecdsl\n{{golden}}```"}}}},
      {"explanation", {"{{solution_summary}}"}},
      {"general", {"I answer household energy questions and can optimize EV charging, thermostat settings, home "
                   "battery use, solar panel area, heat pump choices and battery size."}},
  });
}

std::vector<std::string> ScriptedAdapter::complete(const PromptRequest& request, std::size_t n) {
  std::vector<std::string> out;
  out.reserve(n);
  const std::size_t base = request.role == Role::Formulation ? 0 : request.sample;
  for (std::size_t i = 0; i < n; ++i) out.push_back(reply(request, base + i));
  return out;
}

}  // namespace ec::pipeline
