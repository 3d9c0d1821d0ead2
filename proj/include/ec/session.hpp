#pragma once

// Conversation state: phase machine, elicited values, per-candidate traces
// and the final result.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ec/ir.hpp"
#include "ec/lp.hpp"
#include "ec/params.hpp"
#include "ec/problems.hpp"

namespace ec::pipeline {

enum class Phase {
  AwaitingQuery,
  Clarifying,
  Eliciting,
  Formulating,
  Debugging,
  Explaining,
  Done,
  NonOptimization,
  Failed,
};

std::string to_string(Phase p);
std::optional<Phase> parse_phase(const std::string& s);
bool is_terminal(Phase p);
/// The declared edges of the conversation machine.
bool is_allowed_transition(Phase from, Phase to);

/// One evaluated document for a candidate: the initial sample (iteration 0)
/// or the reply to the k-th debug prompt.
struct AttemptStep {
  std::size_t iteration = 0;
  std::string raw_output;
  std::string document;  // extracted block; empty when extraction failed
  /// Last stage reached: adapter, extract, parse, compile, solve, ok.
  std::string stage;
  std::string error_category;  // Syntactic, Semantic, Solver, Adapter; empty when ok
  std::string error_code;
  std::string error_message;
  std::size_t error_line = 0;
  std::size_t error_column = 0;
  std::string solver_status;  // optimal / infeasible / unbounded when solved
  std::optional<double> objective;

  bool succeeded() const { return stage == "ok"; }
};

enum class Outcome { Solved, Exhausted, Abandoned };
std::string to_string(Outcome o);

struct AttemptTrace {
  std::size_t sample = 0;
  std::vector<AttemptStep> steps;
  std::size_t debug_iterations = 0;
  Outcome outcome = Outcome::Abandoned;
  double wall_ms = 0.0;
};

struct Turn {
  std::string author;  // "user" or "concierge"
  std::string text;
};

struct SessionResult {
  std::size_t winner_sample = 0;
  std::string document;
  ir::OptInstance instance;
  lp::Solution solution;
  std::vector<problems::ReportItem> report;
  std::string explanation_template;
  std::optional<std::string> explanation_model;
  bool explanation_fallback = false;  // model explanation unavailable
  std::string infeasibility_note;
};

struct Session {
  std::string id;
  Phase phase = Phase::AwaitingQuery;
  std::vector<Phase> phase_history;  // every phase entered, in order
  std::optional<problems::ProblemKind> kind;
  std::string query;
  std::vector<std::string> pending;  // parameter names still to ask
  std::map<std::string, problems::ParamValue> elicited;
  std::string spec_note;  // builder precheck message (e.g. InfeasibleSpec)
  std::vector<AttemptTrace> traces;
  std::optional<SessionResult> result;
  std::optional<std::string> failure_code;
  std::optional<std::string> failure_message;
  std::vector<Turn> transcript;
  std::size_t clarify_rounds = 0;
  std::size_t general_replies = 0;
  std::size_t adapter_requests = 0;     // every adapter call of the session
  std::size_t adapter_completions = 0;  // texts requested across those calls
  std::size_t solve_completions = 0;    // texts requested while formulating and explaining
  std::int64_t created_at = 0;          // unix seconds
  std::int64_t updated_at = 0;

  /// Moves to `to`, throwing Error("IllegalTransition") for undeclared edges.
  void transition(Phase to);
  std::optional<problems::ElicitedParams> params() const;
};

/// `canonical` drops wall-clock fields so replays compare byte for byte.
nlohmann::ordered_json to_json(const Session& s, bool canonical = false);
Session session_from_json(const nlohmann::json& j);

nlohmann::ordered_json to_json(const AttemptTrace& t, bool canonical = false);
AttemptTrace trace_from_json(const nlohmann::json& j);

}  // namespace ec::pipeline
