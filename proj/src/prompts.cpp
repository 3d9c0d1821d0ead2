#include "ec/prompts.hpp"

#include <fstream>
#include <sstream>

#include "ec/error.hpp"

namespace ec::pipeline {

std::string render_template(std::string_view tpl, const std::map<std::string, std::string>& vars) {
  std::string out;
  out.reserve(tpl.size());
  std::size_t i = 0;
  while (i < tpl.size()) {
    const auto open = tpl.find("{{", i);
    if (open == std::string_view::npos) break;
    const auto close = tpl.find("}}", open + 2);
    if (close == std::string_view::npos) break;
    out.append(tpl.substr(i, open - i));
    const std::string key(tpl.substr(open + 2, close - open - 2));
    if (auto it = vars.find(key); it != vars.end()) out += it->second;
    else out.append(tpl.substr(open, close + 2 - open));
    i = close + 2;
  }
  out.append(tpl.substr(i));
  return out;
}

PromptSet PromptSet::builtin() {
  PromptSet p;
  p.templates_ = builtin_prompt_templates();
  return p;
}

PromptSet PromptSet::with_overrides(const std::filesystem::path& dir) {
  PromptSet p = builtin();
  if (dir.empty() || !std::filesystem::is_directory(dir)) return p;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".txt") continue;
    std::ifstream f(entry.path());
    std::ostringstream ss;
    ss << f.rdbuf();
    p.templates_[entry.path().stem().string()] = ss.str();
  }
  return p;
}

const std::string& PromptSet::get(const std::string& role) const {
  auto it = templates_.find(role);
  if (it == templates_.end()) throw Error("MissingPrompt", "no prompt template for role '" + role + "'");
  return it->second;
}

std::string PromptSet::render(const std::string& role, const std::map<std::string, std::string>& vars) const {
  return render_template(get(role), vars);
}

}  // namespace ec::pipeline
