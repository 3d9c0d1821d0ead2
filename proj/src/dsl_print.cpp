#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "ec/dsl.hpp"

namespace ec::dsl {

std::string format_number(double v) {
  // to_chars picks the shortest text that round-trips.
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

int precedence(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Add:
    case Expr::Kind::Sub: return 1;
    case Expr::Kind::Mul:
    case Expr::Kind::Div: return 2;
    case Expr::Kind::Neg: return 3;
    default: return 4;
  }
}

void emit(std::ostream& os, const Expr& e);

void emit_child(std::ostream& os, const Expr& child, bool parens) {
  if (parens) os << '(';
  emit(os, child);
  if (parens) os << ')';
}

void emit(std::ostream& os, const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Number: os << format_number(e.number); return;
    case Expr::Kind::Ref:
      os << e.name;
      if (e.int_index) os << '[' << *e.int_index << ']';
      else if (!e.ident_index.empty()) os << '[' << e.ident_index << ']';
      return;
    case Expr::Kind::Neg:
      os << '-';
      emit_child(os, e.args[0], precedence(e.args[0]) < 3);
      return;
    case Expr::Kind::Call:
      os << e.name << '(';
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) os << ", ";
        emit(os, e.args[i]);
      }
      os << ')';
      return;
    default: {
      const int p = precedence(e);
      const char* op = e.kind == Expr::Kind::Add   ? " + "
                       : e.kind == Expr::Kind::Sub ? " - "
                       : e.kind == Expr::Kind::Mul ? " * "
                                                   : " / ";
      emit_child(os, e.args[0], precedence(e.args[0]) < p);
      os << op;
      emit_child(os, e.args[1], precedence(e.args[1]) <= p);
      return;
    }
  }
}

const char* rel_text(ir::Relation r) {
  switch (r) {
    case ir::Relation::Le: return "<=";
    case ir::Relation::Ge: return ">=";
    case ir::Relation::Eq: return "==";
  }
  return "==";
}

}  // namespace

std::string print(const Expr& e) {
  std::ostringstream os;
  emit(os, e);
  return os.str();
}

std::string print(const FormulationDoc& doc) {
  std::ostringstream os;
  os << "problem \"" << doc.problem << "\"\n";
  for (const auto& st : doc.statements) {
    if (const auto* v = std::get_if<VarDecl>(&st)) {
      os << "var " << v->name;
      if (v->length) os << '[' << *v->length << ']';
      for (const auto& b : v->bounds) os << ' ' << rel_text(b.relation) << ' ' << format_number(b.value);
    } else if (const auto* p = std::get_if<ParamDecl>(&st)) {
      os << "param " << p->name;
      if (p->length) os << '[' << *p->length << ']';
      os << " = ";
      if (p->is_vector) {
        os << '[';
        for (std::size_t i = 0; i < p->values.size(); ++i)
          os << (i ? ", " : "") << format_number(p->values[i]);
        os << ']';
      } else {
        os << format_number(p->values.front());
      }
    } else if (const auto* m = std::get_if<Minimize>(&st)) {
      os << "minimize " << print(m->expr);
    } else {
      const auto& s = std::get<Subject>(st);
      os << "subject ";
      if (!s.label.empty()) os << s.label << ": ";
      os << print(s.lhs) << ' ' << rel_text(s.relation) << ' ' << print(s.rhs);
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace ec::dsl
