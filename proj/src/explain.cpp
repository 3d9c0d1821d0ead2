#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "ec/dsl.hpp"
#include "ec/lower.hpp"
#include "ec/pipeline.hpp"

namespace ec::pipeline {

namespace {

constexpr double kBindingSlack = 1e-6;

std::string format_value(double v) {
  if (std::abs(v) < 1e-9) v = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string format_item(double v, const std::string& unit) {
  if (unit == "USD") return format_money(v);
  return format_value(v) + (unit.empty() ? "" : " " + unit);
}

/// "soc_12" -> "soc"; default labels "constraint_3" stay whole.
std::string label_group(const std::string& label) {
  if (label.rfind("constraint_", 0) == 0) return label;
  auto pos = label.find_last_of('_');
  if (pos == std::string::npos || pos + 1 == label.size()) return label;
  for (std::size_t i = pos + 1; i < label.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(label[i]))) return label;
  return label.substr(0, pos);
}

bool feasible_after(const ir::OptInstance& inst) {
  try {
    return ir::solve(inst).status != lp::Status::Infeasible;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

std::string format_money(double v) {
  char buf[64];
  if (std::abs(v) < 0.005) return "$0.00";
  std::snprintf(buf, sizeof buf, "%s$%.2f", v < 0 ? "-" : "", std::abs(v));
  return buf;
}

std::vector<std::string> relaxation_candidates(const ir::OptInstance& instance) {
  std::vector<std::string> out;
  std::vector<std::string> groups;
  for (const auto& c : instance.constraints) {
    auto g = label_group(c.label);
    if (std::find(groups.begin(), groups.end(), g) == groups.end()) groups.push_back(g);
  }
  for (const auto& g : groups) {
    ir::OptInstance relaxed = instance;
    std::erase_if(relaxed.constraints, [&](const ir::Constraint& c) { return label_group(c.label) == g; });
    if (feasible_after(relaxed)) out.push_back("constraint '" + g + "'");
  }
  for (std::size_t v = 0; v < instance.variables.size(); ++v) {
    const auto& var = instance.variables[v];
    bool bounded = false;
    for (std::size_t k = 0; k < var.length; ++k)
      bounded = bounded || std::isfinite(var.lower[k]) || std::isfinite(var.upper[k]);
    if (!bounded) continue;
    ir::OptInstance relaxed = instance;
    auto& rv = relaxed.variables[v];
    std::fill(rv.lower.begin(), rv.lower.end(), -ir::kInf);
    std::fill(rv.upper.begin(), rv.upper.end(), ir::kInf);
    if (feasible_after(relaxed)) out.push_back("bounds on '" + var.name + "'");
  }
  return out;
}

std::string template_explanation(const problems::ElicitedParams& p, const ir::OptInstance& instance,
                                 const lp::Solution& solution,
                                 const std::vector<problems::ReportItem>& report,
                                 const std::string& infeasibility_note) {
  std::ostringstream out;
  const std::string heading = problems::title(p.kind());
  if (solution.status != lp::Status::Optimal) {
    out << heading << ": no plan satisfies every requirement.\n";
    if (!infeasibility_note.empty()) out << infeasibility_note << "\n";
    return out.str();
  }
  out << heading << ": optimal plan found.\n";
  out << "Objective value: " << format_value(*solution.objective) << "\n";
  if (!report.empty()) {
    out << "Key figures:\n";
    for (const auto& r : report) out << "- " << r.label << ": " << format_item(r.value, r.unit) << "\n";
  }

  std::vector<std::pair<std::string, std::size_t>> binding;
  for (const auto& c : instance.constraints) {
    const double slack = std::abs(c.lhs.evaluate(solution.assignment) - c.rhs);
    if (c.relation != ir::Relation::Eq && slack > kBindingSlack) continue;
    const auto g = label_group(c.label);
    auto it = std::find_if(binding.begin(), binding.end(), [&](const auto& b) { return b.first == g; });
    if (it == binding.end()) binding.emplace_back(g, 1);
    else ++it->second;
  }
  if (!binding.empty()) {
    out << "Binding constraints:";
    for (std::size_t i = 0; i < binding.size(); ++i) {
      out << (i ? ", " : " ") << binding[i].first;
      if (binding[i].second > 1) out << " (" << binding[i].second << " rows)";
    }
    out << "\n";
  }

  const auto units = problems::variable_units(p.kind());
  out << "Decision variables:\n";
  for (const auto& var : instance.variables) {
    auto u = units.find(var.name);
    const std::string unit = u == units.end() ? "" : " (" + u->second + ")";
    out << "- " << var.name;
    if (var.is_vector) {
      out << "[0.." << var.length - 1 << "]" << unit << ":";
      for (std::size_t k = 0; k < var.length; ++k) {
        auto it = solution.assignment.find(ir::VarRef{var.name, k});
        out << (k ? ", " : " ") << format_value(it == solution.assignment.end() ? 0.0 : it->second);
      }
    } else {
      auto it = solution.assignment.find(ir::VarRef{var.name, std::nullopt});
      out << unit << ": " << format_value(it == solution.assignment.end() ? 0.0 : it->second);
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace ec::pipeline
