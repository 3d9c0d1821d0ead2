#pragma once

// Instance builders, independent oracles and post-solve reports for the six
// household energy problems.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ec/ir.hpp"
#include "ec/lp.hpp"
#include "ec/params.hpp"

namespace ec::problems {

// Builders throw ParamError with codes InfeasibleSpec, DimensionMismatch,
// BadBounds or NegativeInput.
ir::OptInstance build_ev_charging(const ElicitedParams& p);
ir::OptInstance build_hvac(const ElicitedParams& p);
ir::OptInstance build_battery_dispatch(const ElicitedParams& p);
ir::OptInstance build_pv_sizing(const ElicitedParams& p);
ir::OptInstance build_heat_pump(const ElicitedParams& p);
ir::OptInstance build_battery_sizing(const ElicitedParams& p);

/// Dispatches on p.kind().
ir::OptInstance build(const ElicitedParams& p);

/// Exact optimum computed without the LP solver: greedy fill for EV, clamp for
/// HVAC, value-function recursion for dispatch and closed forms elsewhere.
/// Infeasible specs surface as the builder's ParamError.
lp::Solution oracle(const ElicitedParams& p);

/// Closed-form battery size min(K*eta/(2*P_bat), (D-S)/eta), K = P_e*365*Y.
double battery_sizing_closed_form(double unit_cost, double rate, double years, double demand,
                                  double solar, double eta);

struct ReportItem {
  std::string key;
  std::string label;
  double value = 0.0;
  std::string unit;
};

/// Derived quantities shown to the user (total cost, savings, ...).
std::vector<ReportItem> report(const ElicitedParams& p, const lp::Solution& s);

/// Display unit per decision variable name.
std::map<std::string, std::string> variable_units(ProblemKind kind);
/// Short description per decision variable name.
std::map<std::string, std::string> variable_descriptions(ProblemKind kind);

/// Seeded, valid and feasible parameter set.
ElicitedParams random_params(ProblemKind kind, std::uint64_t seed);

/// Reference parameter sets used by examples and acceptance checks.
ElicitedParams reference_params(ProblemKind kind);

/// Canonical formulation document for these parameters (ecdsl text).
std::string golden_document(const ElicitedParams& p);

}  // namespace ec::problems
