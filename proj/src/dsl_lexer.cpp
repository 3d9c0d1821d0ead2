#include <cctype>
#include <charconv>
#include <cmath>

#include "dsl_internal.hpp"

namespace ec::dsl {

namespace {

struct CodeInfo {
  ErrorCode code;
  const char* name;
};

constexpr CodeInfo kCodes[] = {
    {ErrorCode::NoBlockFound, "NoBlockFound"},
    {ErrorCode::AmbiguousBlocks, "AmbiguousBlocks"},
    {ErrorCode::UnexpectedCharacter, "UnexpectedCharacter"},
    {ErrorCode::UnterminatedString, "UnterminatedString"},
    {ErrorCode::InvalidNumber, "InvalidNumber"},
    {ErrorCode::InvalidIdentifier, "InvalidIdentifier"},
    {ErrorCode::UnexpectedToken, "UnexpectedToken"},
    {ErrorCode::UnexpectedEnd, "UnexpectedEnd"},
    {ErrorCode::NestingTooDeep, "NestingTooDeep"},
    {ErrorCode::UnknownIdentifier, "UnknownIdentifier"},
    {ErrorCode::ArityMismatch, "ArityMismatch"},
    {ErrorCode::NonConvexUse, "NonConvexUse"},
    {ErrorCode::DuplicateMinimize, "DuplicateMinimize"},
    {ErrorCode::MissingMinimize, "MissingMinimize"},
    {ErrorCode::DuplicateDeclaration, "DuplicateDeclaration"},
    {ErrorCode::IndexOutOfRange, "IndexOutOfRange"},
    {ErrorCode::SumLengthMismatch, "SumLengthMismatch"},
    {ErrorCode::NestedSum, "NestedSum"},
    {ErrorCode::InvalidBounds, "InvalidBounds"},
    {ErrorCode::NonFinite, "NonFinite"},
    {ErrorCode::NoVariables, "NoVariables"},
};

}  // namespace

Category category_of(ErrorCode code) {
  return static_cast<int>(code) <= static_cast<int>(ErrorCode::NestingTooDeep) ? Category::Syntactic
                                                                               : Category::Semantic;
}

std::string to_string(ErrorCode code) {
  for (const auto& c : kCodes)
    if (c.code == code) return c.name;
  return "Unknown";
}

std::string to_string(Category c) { return c == Category::Syntactic ? "Syntactic" : "Semantic"; }

DslError::DslError(ErrorCode code, Span span, const std::string& message)
    : Error(to_string(code), message), code_(code), span_(span) {}

std::string DslError::diagnostic() const {
  return std::to_string(span_.line) + ":" + std::to_string(span_.column) + ": " + to_string(code_) +
         ": " + what();
}

namespace detail {

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::Newline: return "end of line";
    case Tok::End: return "end of input";
    case Tok::String: return "string \"" + t.text + "\"";
    default: return "'" + t.text + "'";
  }
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto push = [&](Tok kind, std::size_t len) {
    Token t;
    t.kind = kind;
    t.text = std::string(src.substr(i, len));
    t.span = {line, col};
    out.push_back(std::move(t));
    advance(len);
  };

  while (i < src.size()) {
    const char c = src[i];
    const Span here{line, col};
    if (c == '\n') {
      push(Tok::Newline, 1);
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      push(Tok::Ident, j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::size_t j = i;
      bool integral = true;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j < src.size() && src[j] == '.') {
        integral = false;
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          integral = false;
          while (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) ++k;
          j = k;
        }
      }
      // An identifier glued to a number ("3x") is not a number.
      if (j < src.size() && (std::isalpha(static_cast<unsigned char>(src[j])) || src[j] == '_'))
        throw DslError(ErrorCode::InvalidNumber, here,
                       "malformed number '" + std::string(src.substr(i, j - i + 1)) + "'");
      double v = 0.0;
      auto [p, ec] = std::from_chars(src.data() + i, src.data() + j, v);
      if (ec != std::errc() || p != src.data() + j || !std::isfinite(v))
        throw DslError(ErrorCode::InvalidNumber, here,
                       "number out of range '" + std::string(src.substr(i, j - i)) + "'");
      push(Tok::Number, j - i);
      out.back().number = v;
      out.back().integral = integral;
      continue;
    }
    if (c == '"') {
      std::size_t j = i + 1;
      while (j < src.size() && src[j] != '"' && src[j] != '\n') ++j;
      if (j >= src.size() || src[j] != '"')
        throw DslError(ErrorCode::UnterminatedString, here, "string is not closed on this line");
      Token t;
      t.kind = Tok::String;
      t.text = std::string(src.substr(i + 1, j - i - 1));
      t.span = here;
      out.push_back(std::move(t));
      advance(j - i + 1);
      continue;
    }
    auto two = src.substr(i, 2);
    if (two == "<=") { push(Tok::Le, 2); continue; }
    if (two == ">=") { push(Tok::Ge, 2); continue; }
    if (two == "==") { push(Tok::EqEq, 2); continue; }
    switch (c) {
      case '[': push(Tok::LBracket, 1); continue;
      case ']': push(Tok::RBracket, 1); continue;
      case '(': push(Tok::LParen, 1); continue;
      case ')': push(Tok::RParen, 1); continue;
      case ',': push(Tok::Comma, 1); continue;
      case ':': push(Tok::Colon, 1); continue;
      case '+': push(Tok::Plus, 1); continue;
      case '-': push(Tok::Minus, 1); continue;
      case '*': push(Tok::Star, 1); continue;
      case '/': push(Tok::Slash, 1); continue;
      case '=': push(Tok::Assign, 1); continue;
      default: break;
    }
    std::string shown;
    if (std::isprint(static_cast<unsigned char>(c))) {
      shown = std::string("'") + c + "'";
    } else {
      char buf[8];
      std::snprintf(buf, sizeof buf, "0x%02X", static_cast<unsigned char>(c));
      shown = buf;
    }
    throw DslError(ErrorCode::UnexpectedCharacter, here, "unexpected character " + shown);
  }
  Token end;
  end.kind = Tok::End;
  end.span = {line, col};
  out.push_back(end);
  return out;
}

}  // namespace detail
}  // namespace ec::dsl
