#pragma once

// The ecdsl formulation format: a line-oriented declarative language that a
// model adapter emits and the engine compiles to an OptInstance.
//
//   problem "ev_charging"
//   var x[12] >= 0 <= 15
//   param price[12] = [0.14, 0.14, ...]
//   minimize sum(t, price[t] * x[t])
//   subject energy: sum(t, x[t]) == 70

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ec/error.hpp"
#include "ec/ir.hpp"

namespace ec::dsl {

struct Span {
  std::size_t line = 1;
  std::size_t column = 1;
  friend bool operator==(const Span&, const Span&) = default;
};

enum class Category { Syntactic, Semantic };

enum class ErrorCode {
  // Syntactic
  NoBlockFound,
  AmbiguousBlocks,
  UnexpectedCharacter,
  UnterminatedString,
  InvalidNumber,
  InvalidIdentifier,
  UnexpectedToken,
  UnexpectedEnd,
  NestingTooDeep,
  // Semantic
  UnknownIdentifier,
  ArityMismatch,
  NonConvexUse,
  DuplicateMinimize,
  MissingMinimize,
  DuplicateDeclaration,
  IndexOutOfRange,
  SumLengthMismatch,
  NestedSum,
  InvalidBounds,
  NonFinite,
  NoVariables,
};

Category category_of(ErrorCode code);
std::string to_string(ErrorCode code);
std::string to_string(Category c);

class DslError : public Error {
 public:
  DslError(ErrorCode code, Span span, const std::string& message);

  ErrorCode error_code() const noexcept { return code_; }
  Category category() const noexcept { return category_of(code_); }
  const Span& span() const noexcept { return span_; }
  /// "3:14: UnknownIdentifier: ..." for diagnostics and debug prompts.
  std::string diagnostic() const;

 private:
  ErrorCode code_;
  Span span_;
};

struct Expr {
  enum class Kind { Number, Ref, Neg, Add, Sub, Mul, Div, Call };

  Kind kind = Kind::Number;
  double number = 0.0;
  std::string name;                     // Ref: identifier; Call: function name
  std::optional<std::size_t> int_index;  // Ref: x[3]
  std::string ident_index;              // Ref: x[t]
  std::vector<Expr> args;               // operands / call arguments
  Span span;

  static Expr make_number(double v, Span s);
  static Expr make_ref(std::string name, Span s);
  static Expr make_unary(Kind k, Expr child, Span s);
  static Expr make_binary(Kind k, Expr lhs, Expr rhs, Span s);
};

/// Structural equality ignoring spans.
bool same_structure(const Expr& a, const Expr& b);

struct Bound {
  ir::Relation relation = ir::Relation::Ge;  // Ge (lower) or Le (upper)
  double value = 0.0;
};

struct VarDecl {
  std::string name;
  std::optional<std::size_t> length;
  std::vector<Bound> bounds;
  Span span;
};

struct ParamDecl {
  std::string name;
  std::optional<std::size_t> length;
  bool is_vector = false;  // literal was a bracketed list
  std::vector<double> values;
  Span span;
};

struct Minimize {
  Expr expr;
  Span span;
};

struct Subject {
  std::string label;  // empty when none given
  Expr lhs;
  ir::Relation relation = ir::Relation::Le;
  Expr rhs;
  Span span;
};

using Statement = std::variant<VarDecl, ParamDecl, Minimize, Subject>;

struct FormulationDoc {
  std::string problem;
  Span problem_span;
  std::vector<Statement> statements;
};

bool same_structure(const FormulationDoc& a, const FormulationDoc& b);

/// Text between the first matched fence pair (a tagged `ecdsl` block wins
/// when several blocks exist). Throws DslError NoBlockFound / AmbiguousBlocks.
std::string extract_block(std::string_view raw_model_output);

/// Never throws anything but DslError with a Syntactic code.
FormulationDoc parse(std::string_view text);

/// Never throws anything but DslError with a Semantic code.
ir::OptInstance compile(const FormulationDoc& doc);

/// extract_block + parse + compile. Accepts text with or without fences.
ir::OptInstance compile_text(std::string_view text);

/// Canonical text; parse(print(d)) is structurally equal to d.
std::string print(const FormulationDoc& doc);
std::string print(const Expr& e);

/// Shortest decimal form that parses back to exactly `v`.
std::string format_number(double v);

inline constexpr std::size_t kMaxNesting = 256;  // recursion depth of the parser
inline constexpr std::size_t kMaxVectorLength = 100000;

}  // namespace ec::dsl
