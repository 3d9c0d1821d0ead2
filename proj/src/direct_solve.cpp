#include "ec/direct_solve.hpp"

#include "ec/lower.hpp"
#include "ec/pipeline.hpp"

namespace ec::pipeline {

using nlohmann::ordered_json;

ordered_json variables_json(problems::ProblemKind kind, const ir::OptInstance& inst, const lp::Solution& sol) {
  const auto units = problems::variable_units(kind);
  const auto desc = problems::variable_descriptions(kind);
  ordered_json out = ordered_json::array();
  if (sol.status != lp::Status::Optimal) return out;
  for (const auto& v : inst.variables) {
    ordered_json j;
    j["name"] = v.name;
    auto u = units.find(v.name);
    j["unit"] = u == units.end() ? "" : u->second;
    auto d = desc.find(v.name);
    j["description"] = d == desc.end() ? "" : d->second;
    auto value_at = [&](std::optional<std::size_t> idx) {
      auto it = sol.assignment.find(ir::VarRef{v.name, idx});
      return it == sol.assignment.end() ? 0.0 : it->second;
    };
    if (v.is_vector) {
      j["values"] = ordered_json::array();
      for (std::size_t k = 0; k < v.length; ++k) j["values"].push_back(value_at(k));
    } else {
      j["value"] = value_at(std::nullopt);
    }
    out.push_back(j);
  }
  return out;
}

ordered_json report_json(const std::vector<problems::ReportItem>& items) {
  ordered_json out = ordered_json::array();
  for (const auto& r : items) out.push_back({{"key", r.key}, {"label", r.label}, {"value", r.value}, {"unit", r.unit}});
  return out;
}

ordered_json direct_solve_json(const problems::ElicitedParams& p) {
  const auto inst = problems::build(p);
  const auto sol = ir::solve(inst);
  const auto rep = problems::report(p, sol);
  ordered_json j;
  j["kind"] = problems::to_string(p.kind());
  j["status"] = lp::to_string(sol.status);
  j["objective"] = sol.objective ? ordered_json(*sol.objective) : ordered_json(nullptr);
  j["variables"] = variables_json(p.kind(), inst, sol);
  j["report"] = report_json(rep);
  j["explanation"] = pipeline::template_explanation(
      p, inst, sol, rep, sol.status == lp::Status::Infeasible ? "No feasible plan exists for these inputs." : "");
  j["solution"] = lp::to_json(sol);
  return j;
}

}  // namespace ec::pipeline
