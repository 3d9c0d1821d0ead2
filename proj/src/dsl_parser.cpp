#include "dsl_internal.hpp"

namespace ec::dsl {

using detail::Tok;
using detail::Token;

Expr Expr::make_number(double v, Span s) {
  Expr e;
  e.kind = Kind::Number;
  e.number = v;
  e.span = s;
  return e;
}

Expr Expr::make_ref(std::string name, Span s) {
  Expr e;
  e.kind = Kind::Ref;
  e.name = std::move(name);
  e.span = s;
  return e;
}

Expr Expr::make_unary(Kind k, Expr child, Span s) {
  Expr e;
  e.kind = k;
  e.args.push_back(std::move(child));
  e.span = s;
  return e;
}

Expr Expr::make_binary(Kind k, Expr lhs, Expr rhs, Span s) {
  Expr e;
  e.kind = k;
  e.args.push_back(std::move(lhs));
  e.args.push_back(std::move(rhs));
  e.span = s;
  return e;
}

bool same_structure(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.name != b.name || a.int_index != b.int_index ||
      a.ident_index != b.ident_index || a.args.size() != b.args.size())
    return false;
  if (a.kind == Expr::Kind::Number && a.number != b.number) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!same_structure(a.args[i], b.args[i])) return false;
  return true;
}

bool same_structure(const FormulationDoc& a, const FormulationDoc& b) {
  if (a.problem != b.problem || a.statements.size() != b.statements.size()) return false;
  for (std::size_t i = 0; i < a.statements.size(); ++i) {
    const auto& x = a.statements[i];
    const auto& y = b.statements[i];
    if (x.index() != y.index()) return false;
    if (const auto* v = std::get_if<VarDecl>(&x)) {
      const auto& w = std::get<VarDecl>(y);
      if (v->name != w.name || v->length != w.length || v->bounds.size() != w.bounds.size())
        return false;
      for (std::size_t k = 0; k < v->bounds.size(); ++k)
        if (v->bounds[k].relation != w.bounds[k].relation || v->bounds[k].value != w.bounds[k].value)
          return false;
    } else if (const auto* p = std::get_if<ParamDecl>(&x)) {
      const auto& q = std::get<ParamDecl>(y);
      if (p->name != q.name || p->length != q.length || p->is_vector != q.is_vector ||
          p->values != q.values)
        return false;
    } else if (const auto* m = std::get_if<Minimize>(&x)) {
      if (!same_structure(m->expr, std::get<Minimize>(y).expr)) return false;
    } else {
      const auto& s = std::get<Subject>(x);
      const auto& t = std::get<Subject>(y);
      if (s.label != t.label || s.relation != t.relation || !same_structure(s.lhs, t.lhs) ||
          !same_structure(s.rhs, t.rhs))
        return false;
    }
  }
  return true;
}

namespace {

bool is_reserved(const std::string& s) {
  return s == "problem" || s == "var" || s == "param" || s == "minimize" || s == "subject" ||
         s == "abs" || s == "max0" || s == "sq" || s == "sum";
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  FormulationDoc doc() {
    FormulationDoc d;
    skip_newlines();
    const Token& kw = peek();
    if (!is_keyword(kw, "problem")) fail(kw, "expected 'problem' header");
    d.problem_span = kw.span;
    advance();
    d.problem = expect(Tok::String, "problem name string").text;
    end_of_statement();
    skip_newlines();
    if (peek().kind == Tok::End)
      throw DslError(ErrorCode::UnexpectedEnd, peek().span, "document has no statements");
    while (peek().kind != Tok::End) {
      d.statements.push_back(statement());
      end_of_statement();
      skip_newlines();
    }
    return d;
  }

 private:
  const Token& peek(std::size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  const Token& advance() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  static bool is_keyword(const Token& t, const char* kw) { return t.kind == Tok::Ident && t.text == kw; }

  [[noreturn]] void fail(const Token& t, const std::string& expected) const {
    if (t.kind == Tok::End)
      throw DslError(ErrorCode::UnexpectedEnd, t.span, expected + ", found end of input");
    throw DslError(ErrorCode::UnexpectedToken, t.span, expected + ", found " + detail::describe(t));
  }

  const Token& expect(Tok kind, const std::string& what) {
    if (peek().kind != kind) fail(peek(), "expected " + what);
    return advance();
  }

  void skip_newlines() {
    while (peek().kind == Tok::Newline) advance();
  }

  void end_of_statement() {
    if (peek().kind == Tok::Newline || peek().kind == Tok::End) return;
    fail(peek(), "expected end of line");
  }

  std::string identifier(const std::string& what) {
    const Token& t = expect(Tok::Ident, what);
    if (!ir::is_valid_identifier(t.text))
      throw DslError(ErrorCode::InvalidIdentifier, t.span,
                     "identifier '" + t.text + "' must be lowercase letters, digits and '_'");
    if (is_reserved(t.text))
      throw DslError(ErrorCode::UnexpectedToken, t.span, "'" + t.text + "' is a reserved word");
    return t.text;
  }

  std::size_t integer(const std::string& what) {
    const Token& t = peek();
    if (t.kind != Tok::Number || !t.integral) fail(t, "expected " + what);
    if (t.number > 1e15) throw DslError(ErrorCode::InvalidNumber, t.span, "integer too large");
    advance();
    return static_cast<std::size_t>(t.number);
  }

  double signed_number(const std::string& what) {
    double sign = 1.0;
    if (peek().kind == Tok::Minus) {
      sign = -1.0;
      advance();
    } else if (peek().kind == Tok::Plus) {
      advance();
    }
    return sign * expect(Tok::Number, what).number;
  }

  std::optional<std::size_t> opt_length() {
    if (peek().kind != Tok::LBracket) return std::nullopt;
    advance();
    const std::size_t n = integer("vector length");
    expect(Tok::RBracket, "']'");
    return n;
  }

  Statement statement() {
    const Token& kw = peek();
    if (is_keyword(kw, "var")) return var_decl();
    if (is_keyword(kw, "param")) return param_decl();
    if (is_keyword(kw, "minimize")) {
      Minimize m;
      m.span = advance().span;
      m.expr = expr(0);
      return m;
    }
    if (is_keyword(kw, "subject")) return subject();
    fail(kw, "expected 'var', 'param', 'minimize' or 'subject'");
  }

  VarDecl var_decl() {
    VarDecl v;
    v.span = advance().span;
    v.name = identifier("variable name");
    v.length = opt_length();
    while (peek().kind == Tok::Ge || peek().kind == Tok::Le) {
      const bool lower = advance().kind == Tok::Ge;
      v.bounds.push_back({lower ? ir::Relation::Ge : ir::Relation::Le, signed_number("bound value")});
    }
    return v;
  }

  ParamDecl param_decl() {
    ParamDecl p;
    p.span = advance().span;
    p.name = identifier("parameter name");
    p.length = opt_length();
    expect(Tok::Assign, "'='");
    if (peek().kind == Tok::LBracket) {
      advance();
      p.is_vector = true;
      skip_newlines();
      p.values.push_back(signed_number("number"));
      skip_newlines();
      while (peek().kind == Tok::Comma) {
        advance();
        skip_newlines();
        p.values.push_back(signed_number("number"));
        skip_newlines();
      }
      expect(Tok::RBracket, "']' or ','");
    } else {
      p.values.push_back(signed_number("number or '['"));
    }
    return p;
  }

  Subject subject() {
    Subject s;
    s.span = advance().span;
    if (peek().kind == Tok::Ident && peek(1).kind == Tok::Colon) {
      s.label = identifier("constraint label");
      advance();
    }
    s.lhs = expr(0);
    switch (peek().kind) {
      case Tok::Le: s.relation = ir::Relation::Le; break;
      case Tok::Ge: s.relation = ir::Relation::Ge; break;
      case Tok::EqEq: s.relation = ir::Relation::Eq; break;
      default: fail(peek(), "expected '<=', '>=' or '=='");
    }
    advance();
    s.rhs = expr(0);
    return s;
  }

  void enter(std::size_t depth, const Token& at) const {
    if (depth > kMaxNesting)
      throw DslError(ErrorCode::NestingTooDeep, at.span, "expression nested too deeply");
  }

  Expr expr(std::size_t depth) {
    enter(depth, peek());
    Expr lhs = term(depth + 1);
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const Token& op = advance();
      Expr rhs = term(depth + 1);
      lhs = Expr::make_binary(op.kind == Tok::Plus ? Expr::Kind::Add : Expr::Kind::Sub, std::move(lhs),
                              std::move(rhs), op.span);
    }
    return lhs;
  }

  Expr term(std::size_t depth) {
    enter(depth, peek());
    Expr lhs = unary(depth + 1);
    while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
      const Token& op = advance();
      Expr rhs = unary(depth + 1);
      lhs = Expr::make_binary(op.kind == Tok::Star ? Expr::Kind::Mul : Expr::Kind::Div, std::move(lhs),
                              std::move(rhs), op.span);
    }
    return lhs;
  }

  Expr unary(std::size_t depth) {
    enter(depth, peek());
    if (peek().kind == Tok::Minus) {
      const Span s = advance().span;
      return Expr::make_unary(Expr::Kind::Neg, unary(depth + 1), s);
    }
    return primary(depth + 1);
  }

  Expr primary(std::size_t depth) {
    enter(depth, peek());
    const Token& t = peek();
    if (t.kind == Tok::Number) {
      advance();
      return Expr::make_number(t.number, t.span);
    }
    if (t.kind == Tok::LParen) {
      advance();
      Expr e = expr(depth + 1);
      expect(Tok::RParen, "')'");
      return e;
    }
    if (t.kind != Tok::Ident) fail(t, "expected a number, name or '('");
    if (!ir::is_valid_identifier(t.text))
      throw DslError(ErrorCode::InvalidIdentifier, t.span,
                     "identifier '" + t.text + "' must be lowercase letters, digits and '_'");
    advance();
    if (peek().kind == Tok::LParen) {
      Expr call;
      call.kind = Expr::Kind::Call;
      call.name = t.text;
      call.span = t.span;
      advance();
      call.args.push_back(expr(depth + 1));
      while (peek().kind == Tok::Comma) {
        advance();
        call.args.push_back(expr(depth + 1));
      }
      expect(Tok::RParen, "')' or ','");
      return call;
    }
    if (is_reserved(t.text) && t.text != "sum" && t.text != "abs" && t.text != "max0" && t.text != "sq")
      throw DslError(ErrorCode::UnexpectedToken, t.span, "'" + t.text + "' is a reserved word");
    Expr ref = Expr::make_ref(t.text, t.span);
    if (peek().kind == Tok::LBracket) {
      advance();
      const Token& idx = peek();
      if (idx.kind == Tok::Ident) {
        if (!ir::is_valid_identifier(idx.text))
          throw DslError(ErrorCode::InvalidIdentifier, idx.span, "bad index name '" + idx.text + "'");
        ref.ident_index = idx.text;
        advance();
      } else {
        ref.int_index = integer("index (integer or name)");
      }
      expect(Tok::RBracket, "']'");
    }
    return ref;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

FormulationDoc parse(std::string_view text) {
  Parser p(detail::lex(text));
  return p.doc();
}

}  // namespace ec::dsl
