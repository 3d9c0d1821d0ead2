#pragma once

// The conversation engine: classify, elicit, formulate with several
// candidates, repair failing candidates, solve and explain.

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ec/adapter.hpp"
#include "ec/params.hpp"
#include "ec/prompts.hpp"
#include "ec/session.hpp"

namespace ec::pipeline {

struct PipelineConfig {
  std::size_t samples = 5;     // formulation candidates per solve, 1..8
  std::size_t max_debug = 5;   // repair rounds per candidate
  std::chrono::milliseconds adapter_timeout{60000};  // 0 waits forever
  std::size_t clarify_limit = 3;
  PromptSet prompts = PromptSet::builtin();

  /// Throws Error("BadConfig").
  void check() const;
};

/// Upper bound on formulation, debug and explanation completions per solve.
std::size_t max_solve_completions(const PipelineConfig& cfg);

/// Fresh session in AwaitingQuery.
Session new_session(std::string id);

/// Handles one user message and returns the concierge reply. The session is
/// only modified when the call succeeds; AdapterTimeout during classification
/// or a general answer propagates with the session untouched.
std::string respond(Session& session, const std::string& message, ModelAdapter& adapter,
                    const PipelineConfig& cfg);

/// Runs formulation, repair, solving and explanation for a complete parameter
/// set, bypassing classification and elicitation. The returned session ends
/// in Done or Failed.
Session solve_direct(const problems::ElicitedParams& params, ModelAdapter& adapter,
                     const PipelineConfig& cfg, std::string id = {}, std::string query = {});

/// Parses a raw model reply into an instance and solves it, recording the
/// furthest stage reached and the error that stopped it.
struct Evaluation {
  AttemptStep step;
  std::optional<ir::OptInstance> instance;
  std::optional<lp::Solution> solution;
};
Evaluation evaluate_candidate(const std::string& raw_output, std::size_t iteration);

/// Parameter listing used inside prompts ("- name (unit): value").
std::string params_table(const problems::ElicitedParams& p);

/// Splits a free-text answer into (parameter, answer) pairs for `pending`.
/// Lines "name = value" / "name: value" address any schema parameter;
/// numbered lines map onto pending order; otherwise as many lines as pending
/// questions answer them in order and anything else answers the first one.
std::vector<std::pair<std::string, std::string>> split_answers(
    const problems::ParamSchema& schema, const std::vector<std::string>& pending,
    const std::string& message);

/// Deterministic explanation built from the solution alone.
std::string template_explanation(const problems::ElicitedParams& p, const ir::OptInstance& instance,
                                 const lp::Solution& solution,
                                 const std::vector<problems::ReportItem>& report,
                                 const std::string& infeasibility_note);

/// For an infeasible instance, the constraint groups (labels without their
/// numeric suffix) or variable bounds whose removal alone restores
/// feasibility.
std::vector<std::string> relaxation_candidates(const ir::OptInstance& instance);

/// "$4.20", "-$550.00".
std::string format_money(double v);

}  // namespace ec::pipeline
