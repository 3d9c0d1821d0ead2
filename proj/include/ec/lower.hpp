#pragma once

#include <cstddef>
#include <map>
#include <variant>

#include "ec/ir.hpp"
#include "ec/lp.hpp"

namespace ec::ir {

/// Result of lowering an OptInstance to something a solver accepts.
struct Lowered {
  std::variant<lp::LpProblem, lp::ScalarProblem> problem;
  /// Columns introduced by epigraph rewrites (LP form only).
  std::size_t num_aux = 0;
  /// Declared-but-unreferenced elements in scalar form, pinned to a feasible
  /// value of their box.
  std::map<VarRef, double> pinned;
  /// Scalar form whose constraints already leave an empty domain.
  bool empty_domain = false;

  bool is_lp() const { return std::holds_alternative<lp::LpProblem>(problem); }
  const lp::LpProblem& lp() const { return std::get<lp::LpProblem>(problem); }
  const lp::ScalarProblem& scalar() const { return std::get<lp::ScalarProblem>(problem); }
};

/// Epigraph rewrite to an LP (|e| -> t >= +-e, max(e,0) -> t >= e, t >= 0),
/// or a one-dimensional piecewise-quadratic problem when a square term is
/// present. Precondition: validate(instance) is empty; throws
/// ec::Error("InvalidInstance") otherwise and ec::Error("UnsupportedForm")
/// when squares mix with multi-variable structure.
Lowered lower_to_lp(const OptInstance& instance);

/// validate + lower + solve, mapping auxiliaries away.
lp::Solution solve(const OptInstance& instance);

}  // namespace ec::ir
