#pragma once

// Solvers for lowered problems: a dense two-phase primal simplex (Bland's
// rule) for linear programs and an exact piecewise-quadratic minimizer for
// one-dimensional convex problems.

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ec/ir.hpp"

namespace ec::lp {

inline constexpr double kFeasibilityTol = 1e-7;
inline constexpr double kOptimalityTol = 1e-6;

/// minimize cost . x + cost_constant  s.t.  rows[i] . x (rel) rhs[i],
/// lower <= x <= upper. Infinite bounds mean "absent"; they never reach the
/// tableau.
struct LpProblem {
  std::vector<ir::VarRef> columns;
  std::vector<double> cost;
  double cost_constant = 0.0;
  std::vector<std::vector<double>> rows;
  std::vector<ir::Relation> relations;
  std::vector<double> rhs;
  std::vector<std::string> row_labels;
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t num_cols() const noexcept { return cost.size(); }
  std::size_t num_rows() const noexcept { return rows.size(); }

  /// Throws ec::Error("BadProblem") when dimensions or entries are invalid.
  void check() const;
  /// Largest violation of rows and bounds at x (the independent verifier).
  double max_violation(const std::vector<double>& x) const;
  double objective(const std::vector<double>& x) const;
};

/// a*x^2 + b*x + c on [lo, hi].
struct QuadPiece {
  double lo = -ir::kInf;
  double hi = ir::kInf;
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  double value(double x) const { return (a * x + b) * x + c; }
};

/// Convex, continuous, piecewise-quadratic function of one variable.
struct ScalarProblem {
  ir::VarRef variable;
  std::vector<QuadPiece> pieces;  // contiguous, sorted, covering [lo, hi]

  double lo() const { return pieces.front().lo; }
  double hi() const { return pieces.back().hi; }
  double value(double x) const;
  /// Checks coverage, contiguity, continuity and convexity to 1e-9.
  void check() const;
};

enum class Status { Optimal, Infeasible, Unbounded };

std::string to_string(Status s);

struct Solution {
  Status status = Status::Infeasible;
  std::map<ir::VarRef, double> assignment;  // present iff Optimal
  std::optional<double> objective;          // present iff Optimal
  double feasibility_tol = kFeasibilityTol;
  double optimality_tol = kOptimalityTol;
  std::size_t iterations = 0;
};

nlohmann::ordered_json to_json(const Solution& s);
Solution solution_from_json(const nlohmann::json& j);

/// Two-phase simplex. Deterministic: identical input gives identical output.
/// Throws ec::Error("NumericalBreakdown") instead of returning a wrong answer.
Solution solve_lp(const LpProblem& p);

/// Global minimizer of a ScalarProblem: closed-form vertex per piece,
/// golden-section as fallback when a piece is numerically degenerate.
Solution solve_scalar(const ScalarProblem& p);

/// Golden-section search on [lo, hi] for a unimodal function.
template <class F>
double golden_section(F&& f, double lo, double hi, double tol = 1e-10) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a), x2 = a + kInvPhi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 400 && (b - a) > tol * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    if (f1 <= f2) {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - kInvPhi * (b - a); f1 = f(x1);
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + kInvPhi * (b - a); f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace ec::lp
