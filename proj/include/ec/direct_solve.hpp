#pragma once

// Builder + solver result for a complete parameter set, without any model
// call. Shared by POST /v1/solve, `ec solve --json` and the Python module.

#include <vector>

#include <nlohmann/json.hpp>

#include "ec/ir.hpp"
#include "ec/lp.hpp"
#include "ec/params.hpp"
#include "ec/problems.hpp"

namespace ec::pipeline {

/// [{name, unit, description, value | values}] per declared variable.
nlohmann::ordered_json variables_json(problems::ProblemKind kind, const ir::OptInstance& inst,
                                      const lp::Solution& sol);
nlohmann::ordered_json report_json(const std::vector<problems::ReportItem>& items);

/// {kind, status, objective, variables, report, explanation, solution}.
/// Builder ParamErrors propagate.
nlohmann::ordered_json direct_solve_json(const problems::ElicitedParams& p);

}  // namespace ec::pipeline
