#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace ec::pipeline {

/// Templates compiled from prompts/*.txt at build time, keyed by file stem.
std::map<std::string, std::string> builtin_prompt_templates();

/// Replaces every {{name}} with vars[name]; unknown placeholders are kept.
std::string render_template(std::string_view tpl, const std::map<std::string, std::string>& vars);

/// Role name -> template text.
class PromptSet {
 public:
  static PromptSet builtin();
  /// Builtins overridden by any `<role>.txt` found in `dir`.
  static PromptSet with_overrides(const std::filesystem::path& dir);

  const std::string& get(const std::string& role) const;
  std::string render(const std::string& role, const std::map<std::string, std::string>& vars) const;
  const std::map<std::string, std::string>& all() const noexcept { return templates_; }

 private:
  std::map<std::string, std::string> templates_;
};

}  // namespace ec::pipeline
