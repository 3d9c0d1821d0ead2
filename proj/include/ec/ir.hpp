#pragma once

// Optimization intermediate representation: a minimization problem over
// named scalar/vector variables with a convex objective built from linear,
// absolute-value, hinge and single-variable square terms.

#include <compare>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace ec::ir {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Reference to a scalar variable or one element of a vector variable.
struct VarRef {
  std::string name;
  std::optional<std::size_t> index;

  std::string str() const;

  friend bool operator==(const VarRef&, const VarRef&) = default;
  friend std::strong_ordering operator<=>(const VarRef& a, const VarRef& b) {
    if (auto c = a.name <=> b.name; c != 0) return c;
    return a.index <=> b.index;
  }
};

/// True when `name` matches `[a-z][a-z0-9_]*`.
bool is_valid_identifier(const std::string& name);

/// Affine expression. Terms are kept sorted by VarRef with duplicates merged
/// and zero coefficients dropped, so two equal expressions compare equal.
class LinExpr {
 public:
  using Term = std::pair<VarRef, double>;

  LinExpr() = default;
  explicit LinExpr(double constant) : constant_(constant) {}
  LinExpr(std::vector<Term> terms, double constant);

  static LinExpr var(VarRef ref, double coef = 1.0);

  const std::vector<Term>& terms() const noexcept { return terms_; }
  double constant() const noexcept { return constant_; }
  bool is_constant() const noexcept { return terms_.empty(); }

  LinExpr& operator+=(const LinExpr& other);
  LinExpr& operator-=(const LinExpr& other);
  LinExpr& operator*=(double s);
  LinExpr operator-() const;
  friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
  friend LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
  friend LinExpr operator*(LinExpr a, double s) { return a *= s; }
  friend LinExpr operator*(double s, LinExpr a) { return a *= s; }

  friend bool operator==(const LinExpr&, const LinExpr&) = default;

  double evaluate(const std::map<VarRef, double>& values) const;

 private:
  void normalize();

  std::vector<Term> terms_;
  double constant_ = 0.0;
};

enum class TermKind { Linear, Abs, Hinge0, Square };

/// weight * f(inner) with f = identity / |.| / max(., 0) / (.)^2.
struct ConvexTerm {
  TermKind kind = TermKind::Linear;
  LinExpr inner;
  double weight = 1.0;

  double evaluate(const std::map<VarRef, double>& values) const;
  friend bool operator==(const ConvexTerm&, const ConvexTerm&) = default;
};

enum class Relation { Le, Eq, Ge };

struct Constraint {
  LinExpr lhs;
  Relation relation = Relation::Le;
  double rhs = 0.0;
  std::string label;

  /// Positive amount by which `values` violates the constraint.
  double violation(const std::map<VarRef, double>& values) const;
  friend bool operator==(const Constraint&, const Constraint&) = default;
};

struct Variable {
  std::string name;
  std::size_t length = 1;
  bool is_vector = false;
  std::vector<double> lower;  // one entry per element, -kInf when absent
  std::vector<double> upper;  // one entry per element, +kInf when absent

  static Variable scalar(std::string name, double lo = -kInf, double hi = kInf);
  static Variable vector(std::string name, std::size_t length, double lo = -kInf,
                         double hi = kInf);

  friend bool operator==(const Variable&, const Variable&) = default;
};

/// minimize sum(objective) subject to constraints and variable boxes.
struct OptInstance {
  std::vector<Variable> variables;
  std::vector<ConvexTerm> objective;
  std::vector<Constraint> constraints;
  std::map<std::string, std::string> metadata;

  const Variable* find_variable(const std::string& name) const;
  /// Every element reference in declaration order.
  std::vector<VarRef> element_refs() const;
  /// Objective value at `values` (missing entries read as 0).
  double objective_value(const std::map<VarRef, double>& values) const;
  /// Largest constraint or bound violation at `values`.
  double max_violation(const std::map<VarRef, double>& values) const;

  friend bool operator==(const OptInstance&, const OptInstance&) = default;
};

enum class IssueCode { UnboundVar, IndexOutOfRange, NonConvexWeight, EmptyObjective, BadBounds, NoVariables, NonFinite, BadIdentifier, SquareArity };

struct ValidationIssue {
  IssueCode code;
  std::string message;
  std::string location;  // e.g. "objective[2]" or "constraints[0]"
};

std::string to_string(IssueCode code);
std::string to_string(Relation rel);
std::string to_string(TermKind kind);

/// Returns every invariant violation; empty means the instance is well formed.
std::vector<ValidationIssue> validate(const OptInstance& instance);

// Canonical JSON (stable field order; infinite bounds encoded as null).
nlohmann::ordered_json to_json(const LinExpr& e);
nlohmann::ordered_json to_json(const OptInstance& instance);
LinExpr lin_expr_from_json(const nlohmann::json& j);
OptInstance instance_from_json(const nlohmann::json& j);

}  // namespace ec::ir
