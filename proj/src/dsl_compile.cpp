#include <cmath>
#include <map>
#include <set>

#include "ec/dsl.hpp"

namespace ec::dsl {

namespace {

using ir::ConvexTerm;
using ir::LinExpr;
using ir::TermKind;
using ir::VarRef;

// An expression value: affine part plus signed convex terms.
struct Value {
  LinExpr affine;
  std::vector<ConvexTerm> convex;

  bool is_constant() const { return affine.is_constant() && convex.empty(); }
};

struct VarSym {
  std::size_t length = 1;
  bool is_vector = false;
};

struct ParamSym {
  std::vector<double> values;
  bool is_vector = false;
};

[[noreturn]] void fail(ErrorCode code, Span at, const std::string& msg) { throw DslError(code, at, msg); }

ErrorCode code_for(ir::IssueCode c) {
  switch (c) {
    case ir::IssueCode::UnboundVar: return ErrorCode::UnknownIdentifier;
    case ir::IssueCode::IndexOutOfRange: return ErrorCode::IndexOutOfRange;
    case ir::IssueCode::NonConvexWeight: return ErrorCode::NonConvexUse;
    case ir::IssueCode::EmptyObjective: return ErrorCode::MissingMinimize;
    case ir::IssueCode::BadBounds: return ErrorCode::InvalidBounds;
    case ir::IssueCode::NoVariables: return ErrorCode::NoVariables;
    case ir::IssueCode::NonFinite: return ErrorCode::NonFinite;
    case ir::IssueCode::BadIdentifier: return ErrorCode::UnknownIdentifier;
    case ir::IssueCode::SquareArity: return ErrorCode::ArityMismatch;
  }
  return ErrorCode::NonFinite;
}

class Compiler {
 public:
  ir::OptInstance run(const FormulationDoc& doc) {
    ir::OptInstance inst;
    inst.metadata["problem"] = doc.problem;
    bool have_objective = false;
    std::size_t n_constraints = 0;
    for (const auto& st : doc.statements) {
      if (const auto* v = std::get_if<VarDecl>(&st)) {
        inst.variables.push_back(declare_var(*v));
      } else if (const auto* p = std::get_if<ParamDecl>(&st)) {
        declare_param(*p);
      } else if (const auto* m = std::get_if<Minimize>(&st)) {
        if (have_objective) fail(ErrorCode::DuplicateMinimize, m->span, "a second 'minimize' statement");
        have_objective = true;
        inst.objective = objective(*m);
      } else {
        const auto& s = std::get<Subject>(st);
        ++n_constraints;
        inst.constraints.push_back(constraint(s, n_constraints));
      }
    }
    if (!have_objective) fail(ErrorCode::MissingMinimize, doc.problem_span, "no 'minimize' statement");
    if (inst.variables.empty()) fail(ErrorCode::NoVariables, doc.problem_span, "no 'var' declared");
    if (auto issues = ir::validate(inst); !issues.empty())
      fail(code_for(issues.front().code), doc.problem_span,
           issues.front().location + ": " + issues.front().message);
    return inst;
  }

 private:
  void check_fresh(const std::string& name, Span at) const {
    if (vars_.count(name) || params_.count(name))
      fail(ErrorCode::DuplicateDeclaration, at, "'" + name + "' is already declared");
  }

  static std::size_t checked_length(std::size_t n, Span at) {
    if (n == 0 || n > kMaxVectorLength)
      fail(ErrorCode::ArityMismatch, at,
           "vector length must be between 1 and " + std::to_string(kMaxVectorLength));
    return n;
  }

  ir::Variable declare_var(const VarDecl& v) {
    check_fresh(v.name, v.span);
    double lo = -ir::kInf, hi = ir::kInf;
    for (const auto& b : v.bounds) {
      if (!std::isfinite(b.value)) fail(ErrorCode::NonFinite, v.span, "bound must be finite");
      if (b.relation == ir::Relation::Ge) lo = std::max(lo, b.value);
      else hi = std::min(hi, b.value);
    }
    if (lo > hi)
      fail(ErrorCode::InvalidBounds, v.span,
           "lower bound " + format_number(lo) + " exceeds upper bound " + format_number(hi) + " for '" +
               v.name + "'");
    VarSym sym;
    sym.is_vector = v.length.has_value();
    sym.length = sym.is_vector ? checked_length(*v.length, v.span) : 1;
    vars_[v.name] = sym;
    return sym.is_vector ? ir::Variable::vector(v.name, sym.length, lo, hi)
                         : ir::Variable::scalar(v.name, lo, hi);
  }

  void declare_param(const ParamDecl& p) {
    check_fresh(p.name, p.span);
    for (double x : p.values)
      if (!std::isfinite(x)) fail(ErrorCode::NonFinite, p.span, "parameter values must be finite");
    ParamSym sym;
    sym.values = p.values;
    sym.is_vector = p.is_vector || p.length.has_value();
    if (p.length) {
      checked_length(*p.length, p.span);
      if (*p.length != p.values.size())
        fail(ErrorCode::ArityMismatch, p.span,
             "'" + p.name + "' declares " + std::to_string(*p.length) + " entries but lists " +
                 std::to_string(p.values.size()));
    } else if (p.is_vector) {
      checked_length(p.values.size(), p.span);
    }
    params_[p.name] = std::move(sym);
  }

  std::vector<ConvexTerm> objective(const Minimize& m) {
    Value v = eval(m.expr);
    std::vector<ConvexTerm> terms;
    terms.push_back({TermKind::Linear, v.affine, 1.0});
    for (auto& t : v.convex) {
      if (t.weight < 0.0)
        fail(ErrorCode::NonConvexUse, m.span,
             "minimizing a negatively weighted " + ir::to_string(t.kind) + " term is not convex");
      if (t.weight == 0.0) continue;
      terms.push_back(std::move(t));
    }
    check_finite(terms, m.span);
    return terms;
  }

  ir::Constraint constraint(const Subject& s, std::size_t ordinal) {
    Value lhs = eval(s.lhs);
    Value rhs = eval(s.rhs);
    if (!lhs.convex.empty() || !rhs.convex.empty())
      fail(ErrorCode::NonConvexUse, s.span, "abs/max0/sq are only allowed in the objective");
    LinExpr e = lhs.affine - rhs.affine;
    const double k = e.constant();
    ir::Constraint c{e - LinExpr(k), s.relation, -k,
                     s.label.empty() ? "constraint_" + std::to_string(ordinal) : s.label};
    check_finite({{TermKind::Linear, c.lhs, 1.0}}, s.span);
    if (!std::isfinite(c.rhs)) fail(ErrorCode::NonFinite, s.span, "constraint constant is not finite");
    return c;
  }

  static void check_finite(const std::vector<ConvexTerm>& terms, Span at) {
    for (const auto& t : terms) {
      bool ok = std::isfinite(t.weight) && std::isfinite(t.inner.constant());
      for (const auto& [r, c] : t.inner.terms()) ok = ok && std::isfinite(c);
      if (!ok) fail(ErrorCode::NonFinite, at, "expression produces a non-finite coefficient");
    }
  }

  std::size_t resolve_index(const Expr& ref, std::size_t length) const {
    std::size_t idx = 0;
    if (ref.int_index) {
      idx = *ref.int_index;
    } else {
      if (!binding_ || binding_->first != ref.ident_index)
        fail(ErrorCode::UnknownIdentifier, ref.span,
             "index '" + ref.ident_index + "' is not bound by an enclosing sum");
      idx = binding_->second;
    }
    if (idx >= length)
      fail(ErrorCode::IndexOutOfRange, ref.span,
           "index " + std::to_string(idx) + " is out of range for '" + ref.name + "' of length " +
               std::to_string(length));
    return idx;
  }

  Value eval_ref(const Expr& e) const {
    const bool indexed = e.int_index.has_value() || !e.ident_index.empty();
    if (auto it = params_.find(e.name); it != params_.end()) {
      const ParamSym& p = it->second;
      if (p.is_vector != indexed)
        fail(ErrorCode::ArityMismatch, e.span,
             p.is_vector ? "vector parameter '" + e.name + "' needs an index"
                         : "scalar parameter '" + e.name + "' cannot be indexed");
      const std::size_t i = indexed ? resolve_index(e, p.values.size()) : 0;
      return Value{LinExpr(p.values[i]), {}};
    }
    if (auto it = vars_.find(e.name); it != vars_.end()) {
      const VarSym& v = it->second;
      if (v.is_vector != indexed)
        fail(ErrorCode::ArityMismatch, e.span,
             v.is_vector ? "vector variable '" + e.name + "' needs an index"
                         : "scalar variable '" + e.name + "' cannot be indexed");
      if (!indexed) return Value{LinExpr::var(VarRef{e.name, std::nullopt}), {}};
      return Value{LinExpr::var(VarRef{e.name, resolve_index(e, v.length)}), {}};
    }
    if (binding_ && binding_->first == e.name && !indexed)
      fail(ErrorCode::NonConvexUse, e.span, "sum index '" + e.name + "' cannot be used as a value");
    fail(ErrorCode::UnknownIdentifier, e.span, "'" + e.name + "' is not declared");
  }

  static void negate(Value& v) {
    v.affine = -v.affine;
    for (auto& t : v.convex) t.weight = -t.weight;
  }

  static void scale(Value& v, double s) {
    v.affine *= s;
    for (auto& t : v.convex) t.weight *= s;
  }

  static void add(Value& a, Value b) {
    a.affine += b.affine;
    a.convex.insert(a.convex.end(), std::make_move_iterator(b.convex.begin()),
                    std::make_move_iterator(b.convex.end()));
  }

  void collect_sum_lengths(const Expr& e, const std::string& idx, std::set<std::size_t>& lengths,
                           Span& first) const {
    if (e.kind == Expr::Kind::Call && e.name == "sum")
      fail(ErrorCode::NestedSum, e.span, "sums cannot be nested");
    if (e.kind == Expr::Kind::Ref && e.ident_index == idx) {
      std::size_t len = 0;
      if (auto p = params_.find(e.name); p != params_.end() && p->second.is_vector) len = p->second.values.size();
      else if (auto v = vars_.find(e.name); v != vars_.end() && v->second.is_vector) len = v->second.length;
      else if (params_.count(e.name) || vars_.count(e.name))
        fail(ErrorCode::ArityMismatch, e.span, "'" + e.name + "' is not a vector");
      else fail(ErrorCode::UnknownIdentifier, e.span, "'" + e.name + "' is not declared");
      if (lengths.empty()) first = e.span;
      lengths.insert(len);
    }
    for (const auto& a : e.args) collect_sum_lengths(a, idx, lengths, first);
  }

  Value eval_sum(const Expr& e) {
    if (e.args.size() != 2) fail(ErrorCode::ArityMismatch, e.span, "sum takes (index, expression)");
    if (binding_) fail(ErrorCode::NestedSum, e.span, "sums cannot be nested");
    const Expr& idx = e.args[0];
    if (idx.kind != Expr::Kind::Ref || idx.int_index || !idx.ident_index.empty())
      fail(ErrorCode::ArityMismatch, idx.span, "first argument of sum must be an index name");
    if (vars_.count(idx.name) || params_.count(idx.name))
      fail(ErrorCode::DuplicateDeclaration, idx.span, "sum index '" + idx.name + "' shadows a declaration");
    std::set<std::size_t> lengths;
    Span first = e.span;
    collect_sum_lengths(e.args[1], idx.name, lengths, first);
    if (lengths.empty())
      fail(ErrorCode::SumLengthMismatch, e.span, "no vector is indexed by '" + idx.name + "'");
    if (lengths.size() > 1)
      fail(ErrorCode::SumLengthMismatch, first,
           "vectors indexed by '" + idx.name + "' have different lengths");
    const std::size_t n = *lengths.begin();

    std::vector<LinExpr::Term> terms;
    double constant = 0.0;
    Value out;
    for (std::size_t k = 0; k < n; ++k) {
      binding_ = std::pair{idx.name, k};
      Value v = eval(e.args[1]);
      terms.insert(terms.end(), v.affine.terms().begin(), v.affine.terms().end());
      constant += v.affine.constant();
      out.convex.insert(out.convex.end(), v.convex.begin(), v.convex.end());
    }
    binding_.reset();
    out.affine = LinExpr(std::move(terms), constant);
    return out;
  }

  Value eval_call(const Expr& e) {
    if (e.name == "sum") return eval_sum(e);
    TermKind kind;
    if (e.name == "abs") kind = TermKind::Abs;
    else if (e.name == "max0") kind = TermKind::Hinge0;
    else if (e.name == "sq") kind = TermKind::Square;
    else fail(ErrorCode::UnknownIdentifier, e.span, "unknown function '" + e.name + "'");
    if (e.args.size() != 1) fail(ErrorCode::ArityMismatch, e.span, e.name + " takes one argument");
    Value inner = eval(e.args[0]);
    if (!inner.convex.empty())
      fail(ErrorCode::NonConvexUse, e.span, e.name + " must be applied to an affine expression");
    if (kind == TermKind::Square) {
      if (binding_) fail(ErrorCode::NonConvexUse, e.span, "sq cannot be used inside a sum");
      if (inner.affine.terms().size() > 1)
        fail(ErrorCode::ArityMismatch, e.span, "sq takes an expression of a single variable");
    }
    return Value{LinExpr(), {ConvexTerm{kind, inner.affine, 1.0}}};
  }

  Value eval(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Number: return Value{LinExpr(e.number), {}};
      case Expr::Kind::Ref: return eval_ref(e);
      case Expr::Kind::Neg: {
        Value v = eval(e.args[0]);
        negate(v);
        return v;
      }
      case Expr::Kind::Add:
      case Expr::Kind::Sub: {
        Value a = eval(e.args[0]);
        Value b = eval(e.args[1]);
        if (e.kind == Expr::Kind::Sub) negate(b);
        add(a, std::move(b));
        return a;
      }
      case Expr::Kind::Mul: {
        Value a = eval(e.args[0]);
        Value b = eval(e.args[1]);
        if (a.is_constant()) {
          scale(b, a.affine.constant());
          return b;
        }
        if (b.is_constant()) {
          scale(a, b.affine.constant());
          return a;
        }
        fail(ErrorCode::NonConvexUse, e.span, "product of two non-constant expressions");
      }
      case Expr::Kind::Div: {
        Value a = eval(e.args[0]);
        Value b = eval(e.args[1]);
        if (!b.is_constant()) fail(ErrorCode::NonConvexUse, e.span, "division by a non-constant expression");
        if (b.affine.constant() == 0.0) fail(ErrorCode::NonFinite, e.span, "division by zero");
        scale(a, 1.0 / b.affine.constant());
        return a;
      }
      case Expr::Kind::Call: return eval_call(e);
    }
    fail(ErrorCode::NonConvexUse, e.span, "unsupported expression");
  }

  std::map<std::string, VarSym> vars_;
  std::map<std::string, ParamSym> params_;
  std::optional<std::pair<std::string, std::size_t>> binding_;
};

}  // namespace

ir::OptInstance compile(const FormulationDoc& doc) { return Compiler().run(doc); }

ir::OptInstance compile_text(std::string_view text) {
  std::string body;
  if (text.find("```") != std::string_view::npos) body = extract_block(text);
  else body = std::string(text);
  return compile(parse(body));
}

}  // namespace ec::dsl
