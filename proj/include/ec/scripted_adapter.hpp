#pragma once

// Deterministic adapter replaying canned replies from a JSON script.
//
// {
//   "classification": ["ev_charging"],          // by retry index
//   "elicitation":    ["Happy to help!"],       // by question batch
//   "formulation":    ["```ecdsl\n{{golden}}```", "..."],  // by sample index
//   "debug":  {"0": ["..."], "*": ["..."]},     // by sample, then debug round
//   "explanation":    ["..."],
//   "general":        ["..."],
//   "user":           ["I need help ...", "charger_max_kw = 15", ...],
//   "baselines":      {"ev_charging": 5.0}          // benchmark v_b per kind
// }
//
// Lists are indexed by the request's sample/iteration and repeat their last
// entry when exhausted. An entry {"timeout": true} simulates an expired call.
// Placeholders: {{golden}} expands to the canonical document for the request's
// kind and parameters, {{classify}} to a keyword-based label for the query, and
// any other {{name}} to the request variable of that name.
// Lookups are stateless, so one instance can serve concurrent sessions.

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ec/adapter.hpp"

namespace ec::pipeline {

class ScriptedAdapter : public ModelAdapter {
 public:
  /// Throws Error("BadScript") when the shape is wrong.
  explicit ScriptedAdapter(nlohmann::json script);
  /// Throws Error("ScriptMissing") when the file does not exist.
  static ScriptedAdapter from_file(const std::filesystem::path& path);

  std::vector<std::string> complete(const PromptRequest& request, std::size_t n) override;
  std::string name() const override { return "scripted"; }

  /// Scripted user turns for `ec chat`.
  std::vector<std::string> user_turns() const;
  const nlohmann::json& script() const noexcept { return script_; }

 private:
  std::string reply(const PromptRequest& request, std::size_t sample) const;

  nlohmann::json script_;
};

/// Replies that need no model: keyword classification, canonical documents and
/// the template explanation. The gateway's default adapter.
ScriptedAdapter offline_adapter();

/// Keyword classifier used by the {{classify}} placeholder.
std::string keyword_label(const std::string& query);

}  // namespace ec::pipeline
