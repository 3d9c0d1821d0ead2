#include <random>

#include <gtest/gtest.h>

#include "ec/dsl.hpp"
#include "ec/lower.hpp"
#include "ec/problems.hpp"
#include "test_support.hpp"

using namespace ec;
using namespace ec::dsl;

namespace {

ErrorCode error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const DslError& e) {
    return e.error_code();
  }
  throw std::runtime_error("no DslError raised");
}

const char* kEv =
    "problem \"ev\"\n"
    "var x[12] >= 0 <= 15\n"
    "param p[12] = [0.14, 0.14, 0.14, 0.14, 0.06, 0.06, 0.06, 0.06, 0.06, 0.06, 0.06, 0.06]\n"
    "minimize sum(t, p[t]*x[t])\n"
    "subject sum(t, x[t]) == 70\n";

}  // namespace

// ---- extraction -----------------------------------------------------------------

struct ExtractCase {
  const char* name;
  const char* input;
  const char* expected;  // nullptr when an error is expected
  ErrorCode error;
};

class ExtractTable : public ::testing::TestWithParam<ExtractCase> {};

TEST_P(ExtractTable, Resolves) {
  const auto& c = GetParam();
  if (c.expected) {
    EXPECT_EQ(extract_block(c.input), c.expected);
  } else {
    EXPECT_EQ(error_of([&] { (void)extract_block(c.input); }), c.error);
  }
}

INSTANTIATE_TEST_SUITE_P(
    Fences, ExtractTable,
    ::testing::Values(
        ExtractCase{"single_tagged", "here you go:\n```ecdsl\nproblem \"x\"\nvar a\n```\nbye", "problem \"x\"\nvar a\n",
                    ErrorCode::NoBlockFound},
        ExtractCase{"single_untagged", "```\n\nvar a\n\n```", "var a\n", ErrorCode::NoBlockFound},
        ExtractCase{"no_fence", "just charge at night", nullptr, ErrorCode::NoBlockFound},
        ExtractCase{"unclosed", "```ecdsl\nvar a\n", nullptr, ErrorCode::NoBlockFound},
        ExtractCase{"two_untagged", "```\nA\n```\ntext\n```\nB\n```", nullptr, ErrorCode::AmbiguousBlocks},
        ExtractCase{"second_tagged", "```\nA\n```\n```ecdsl\nB\n```", "B\n", ErrorCode::NoBlockFound},
        ExtractCase{"first_tagged", "```ecdsl\nA\n```\n```python\nB\n```", "A\n", ErrorCode::NoBlockFound},
        ExtractCase{"two_tagged", "```ecdsl\nA\n```\n```ecdsl\nB\n```", nullptr, ErrorCode::AmbiguousBlocks},
        ExtractCase{"other_language_only", "```python\nprint(1)\n```", "print(1)\n", ErrorCode::NoBlockFound}),
    [](const ::testing::TestParamInfo<ExtractCase>& info) { return std::string(info.param.name); });

// ---- parsing ----------------------------------------------------------------------

TEST(Parse, EvDocumentShape) {
  const auto doc = parse(kEv);
  EXPECT_EQ(doc.problem, "ev");
  ASSERT_EQ(doc.statements.size(), 4u);
  const auto& var = std::get<VarDecl>(doc.statements[0]);
  EXPECT_EQ(var.name, "x");
  EXPECT_EQ(var.length, 12u);
  ASSERT_EQ(var.bounds.size(), 2u);
  EXPECT_EQ(std::get<ParamDecl>(doc.statements[1]).values.size(), 12u);
  EXPECT_TRUE(std::holds_alternative<Minimize>(doc.statements[2]));
  const auto& sub = std::get<Subject>(doc.statements[3]);
  EXPECT_EQ(sub.relation, ir::Relation::Eq);
  EXPECT_EQ(sub.span, (Span{5, 1}));
}

TEST(Parse, MisspelledKeywordAtStart) {
  try {
    (void)parse("minimise x\n");
    FAIL();
  } catch (const DslError& e) {
    EXPECT_EQ(e.error_code(), ErrorCode::UnexpectedToken);
    EXPECT_EQ(e.category(), Category::Syntactic);
    EXPECT_EQ(e.span(), (Span{1, 1}));
  }
}

TEST(Parse, SyntaxErrorsCarrySpans) {
  try {
    (void)parse("problem \"a\"\nvar x >= 0\nminimize x +\n");
    FAIL();
  } catch (const DslError& e) {
    EXPECT_EQ(e.category(), Category::Syntactic);
    EXPECT_EQ(e.span().line, 3u);
    EXPECT_NE(e.diagnostic().find("3:"), std::string::npos);
  }
  EXPECT_EQ(error_of([] { (void)parse("problem \"a\nvar x"); }), ErrorCode::UnterminatedString);
  EXPECT_EQ(error_of([] { (void)parse("problem \"a\"\nvar x >= 1e\n"); }), ErrorCode::InvalidNumber);
  EXPECT_EQ(error_of([] { (void)parse("problem \"a\"\nvar x @\n"); }), ErrorCode::UnexpectedCharacter);
  EXPECT_EQ(error_of([] { (void)parse(""); }), ErrorCode::UnexpectedEnd);
}

TEST(Parse, DeepNestingIsRejectedNotOverflowed) {
  std::string expr(5000, '(');
  expr += "x";
  expr += std::string(5000, ')');
  EXPECT_EQ(error_of([&] { (void)parse("problem \"a\"\nvar x\nminimize " + expr + "\n"); }), ErrorCode::NestingTooDeep);
}

TEST(Parse, DuplicateMinimizeParsesButDoesNotCompile) {
  const auto doc = parse("problem \"a\"\nvar x >= 0\nminimize x\nminimize 2 * x\n");
  EXPECT_EQ(error_of([&] { (void)compile(doc); }), ErrorCode::DuplicateMinimize);
}

// ---- compiling ----------------------------------------------------------------------

TEST(Compile, EvDocumentSolvesToReference) {
  const auto inst = compile(parse(kEv));
  EXPECT_TRUE(ir::validate(inst).empty());
  const auto s = ir::solve(inst);
  EXPECT_NEAR(*s.objective, 4.20, 1e-9);
}

TEST(Compile, SemanticErrors) {
  const std::pair<const char*, ErrorCode> cases[] = {
      {"problem \"a\"\nvar x[3]\nminimize q[3]\n", ErrorCode::UnknownIdentifier},
      {"problem \"a\"\nvar x[3]\nminimize x\n", ErrorCode::ArityMismatch},
      {"problem \"a\"\nvar x[3]\nminimize sum(t, sq(x[t]))\n", ErrorCode::NonConvexUse},
      {"problem \"a\"\nvar x\nminimize -abs(x)\n", ErrorCode::NonConvexUse},
      {"problem \"a\"\nvar x\nvar x\nminimize x\n", ErrorCode::DuplicateDeclaration},
      {"problem \"a\"\nvar x\nsubject x <= 1\n", ErrorCode::MissingMinimize},
      {"problem \"a\"\nvar x[3]\nminimize x[5]\n", ErrorCode::IndexOutOfRange},
      {"problem \"a\"\nvar x[3]\nvar y[4]\nminimize sum(t, x[t] + y[t])\n", ErrorCode::SumLengthMismatch},
      {"problem \"a\"\nvar x[3]\nminimize sum(t, sum(s, x[s]))\n", ErrorCode::NestedSum},
      {"problem \"a\"\nvar x >= 2 <= 1\nminimize x\n", ErrorCode::InvalidBounds},
      {"problem \"a\"\nparam k = 2\nminimize k\n", ErrorCode::NoVariables},
  };
  for (const auto& [text, code] : cases) {
    const auto doc = parse(text);
    try {
      (void)compile(doc);
      ADD_FAILURE() << "compiled: " << text;
    } catch (const DslError& e) {
      EXPECT_EQ(e.error_code(), code) << text << " -> " << e.diagnostic();
      EXPECT_EQ(e.category(), Category::Semantic);
    }
  }
}

TEST(Compile, UnknownIdentifierHasSpan) {
  try {
    (void)compile(parse("problem \"a\"\nvar x[4]\nminimize x[0] + q[3]\n"));
    FAIL();
  } catch (const DslError& e) {
    EXPECT_EQ(e.span(), (Span{3, 17}));
  }
}

TEST(Compile, BatterySizingDocumentLowersToScalar) {
  const auto text = test::read_text(test::fixture("dsl/golden_battery_sizing.ecdsl"));
  const auto inst = compile(parse(text));
  const auto low = ir::lower_to_lp(inst);
  EXPECT_FALSE(low.is_lp());
  const auto builder = problems::build(problems::reference_params(problems::ProblemKind::BatterySizing));
  EXPECT_EQ(inst.variables.size(), builder.variables.size());
  EXPECT_EQ(inst.variables[0].name, builder.variables[0].name);
}

// ---- fixtures ---------------------------------------------------------------------------

TEST(Fixtures, GoldenDocumentsMatchOracles) {
  for (auto kind : problems::kAllKinds) {
    const auto p = problems::reference_params(kind);
    const auto text = test::read_text(test::fixture("dsl/golden_" + problems::to_string(kind) + ".ecdsl"));
    const auto s = ir::solve(compile_text(text));
    ASSERT_EQ(s.status, lp::Status::Optimal) << problems::to_string(kind);
    EXPECT_NEAR(*s.objective, *problems::oracle(p).objective, 1e-6) << problems::to_string(kind);
  }
}

TEST(Fixtures, GoldenGeneratorMatchesBuilderOnRandomParams) {
  for (auto kind : problems::kAllKinds)
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto p = problems::random_params(kind, seed);
      const auto from_doc = ir::solve(compile_text(problems::golden_document(p)));
      const auto from_builder = ir::solve(problems::build(p));
      EXPECT_NEAR(*from_doc.objective, *from_builder.objective,
                  1e-6 * std::max(1.0, std::abs(*from_builder.objective)))
          << problems::to_string(kind) << " seed " << seed;
    }
}

TEST(Fixtures, BrokenDocumentsFailInTheirCategory) {
  const std::tuple<const char*, Category, ErrorCode> cases[] = {
      {"broken_syntax", Category::Syntactic, ErrorCode::UnexpectedToken},
      {"broken_unknown_identifier", Category::Semantic, ErrorCode::UnknownIdentifier},
      {"broken_duplicate_minimize", Category::Semantic, ErrorCode::DuplicateMinimize},
      {"broken_nonconvex", Category::Semantic, ErrorCode::NonConvexUse},
  };
  for (const auto& [name, cat, code] : cases) {
    const auto text = test::read_text(test::fixture(std::string("dsl/") + name + ".ecdsl"));
    try {
      (void)compile_text(text);
      ADD_FAILURE() << name << " compiled";
    } catch (const DslError& e) {
      EXPECT_EQ(e.category(), cat) << name;
      EXPECT_EQ(e.error_code(), code) << name;
      // Syntactic errors come from parse alone; semantic ones survive parsing.
      if (cat == Category::Semantic) EXPECT_NO_THROW((void)parse(text)) << name;
    }
  }
}

// ---- properties -------------------------------------------------------------------------

TEST(Property, PrintParseRoundTrip) {
  std::vector<std::string> docs{kEv};
  for (auto kind : problems::kAllKinds)
    for (std::uint64_t seed = 0; seed < 5; ++seed) docs.push_back(problems::golden_document(problems::random_params(kind, seed)));
  docs.push_back("problem \"ops\"\nvar a >= -1\nvar v[2]\nparam k = 3\n"
                 "minimize -(a - 2) * k / 4 + abs(v[0] - v[1]) + max0(1 - a)\n"
                 "subject c1: 2 * a + v[0] >= -3\nsubject a - (v[1] - 1) <= 0.5\n");
  for (const auto& text : docs) {
    const auto doc = parse(text);
    const auto printed = print(doc);
    const auto again = parse(printed);
    EXPECT_TRUE(same_structure(doc, again)) << printed;
    EXPECT_EQ(print(again), printed);
  }
}

TEST(Property, FormatNumberRoundTrips) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 10000; ++i) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 20) - 10);
    EXPECT_EQ(std::strtod(format_number(v).c_str(), nullptr), v);
  }
  EXPECT_EQ(format_number(70.0), "70");
  EXPECT_EQ(format_number(0.1), "0.1");
}

TEST(Property, ParseIsTotalOnArbitraryBytes) {
  // Random bytes and token soup: only Syntactic DslErrors may escape parse,
  // only Semantic ones compile.
  std::mt19937_64 rng(12345);
  const std::vector<std::string> tokens{"problem", "\"p\"", "var",  "param", "minimize", "subject", "x",   "y",
                                        "[",       "]",     "(",    ")",     "3",        "2.5e1",   "-",   "+",
                                        "*",       "/",     ",",    "=",     "==",       "<=",      ">=",  "sum(",
                                        "abs(",    "max0(", "sq(",  "t",     "\n",       ":",       "1e999", "#"};
  std::size_t syntactic = 0, semantic = 0, ok = 0;
  for (int i = 0; i < 100000; ++i) {
    std::string text;
    if (i % 2 == 0) {
      const std::size_t len = rng() % 200;
      for (std::size_t k = 0; k < len; ++k) text.push_back(static_cast<char>(rng() % 256));
    } else {
      text = "problem \"f\"\n";
      const std::size_t len = rng() % 40;
      for (std::size_t k = 0; k < len; ++k) text += tokens[rng() % tokens.size()] + " ";
    }
    FormulationDoc doc;
    try {
      doc = parse(text);
    } catch (const DslError& e) {
      ASSERT_EQ(e.category(), Category::Syntactic) << e.diagnostic();
      ++syntactic;
      continue;
    }
    try {
      (void)compile(doc);
      ++ok;
    } catch (const DslError& e) {
      ASSERT_EQ(e.category(), Category::Semantic) << e.diagnostic();
      ++semantic;
    }
  }
  EXPECT_GT(syntactic, 0u);
  EXPECT_GT(semantic + ok, 0u);
}

TEST(Property, LargeInputStaysBounded) {
  std::string text = "problem \"big\"\nvar x\nminimize x";
  while (text.size() < 64 * 1024) text += " + x";
  text += "\n";
  EXPECT_NO_THROW((void)compile(parse(text)));
  std::string junk(64 * 1024, '(');
  EXPECT_THROW((void)parse(junk), DslError);
}
