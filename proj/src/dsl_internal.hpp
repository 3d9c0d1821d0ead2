#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ec/dsl.hpp"

namespace ec::dsl::detail {

enum class Tok {
  Ident,
  Number,
  String,
  LBracket,
  RBracket,
  LParen,
  RParen,
  Comma,
  Colon,
  Plus,
  Minus,
  Star,
  Slash,
  Le,
  Ge,
  EqEq,
  Assign,
  Newline,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  double number = 0.0;
  bool integral = false;  // Number without '.' or exponent
  Span span;
};

std::string describe(const Token& t);

/// Comments run from '#' to end of line. Throws Syntactic DslError.
std::vector<Token> lex(std::string_view text);

}  // namespace ec::dsl::detail
