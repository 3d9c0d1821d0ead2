#include "ec/session.hpp"

#include <algorithm>

namespace ec::pipeline {

using nlohmann::ordered_json;

namespace {

constexpr std::pair<Phase, const char*> kPhases[] = {
    {Phase::AwaitingQuery, "awaiting_query"}, {Phase::Clarifying, "clarifying"},
    {Phase::Eliciting, "eliciting"},          {Phase::Formulating, "formulating"},
    {Phase::Debugging, "debugging"},          {Phase::Explaining, "explaining"},
    {Phase::Done, "done"},                    {Phase::NonOptimization, "non_optimization"},
    {Phase::Failed, "failed"},
};

ordered_json opt_string(const std::optional<std::string>& s) {
  return s ? ordered_json(*s) : ordered_json(nullptr);
}

std::optional<std::string> get_opt_string(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::string>();
}

ordered_json step_json(const AttemptStep& s) {
  ordered_json j;
  j["iteration"] = s.iteration;
  j["raw_output"] = s.raw_output;
  j["document"] = s.document;
  j["stage"] = s.stage;
  j["error_category"] = s.error_category;
  j["error_code"] = s.error_code;
  j["error_message"] = s.error_message;
  j["error_line"] = s.error_line;
  j["error_column"] = s.error_column;
  j["solver_status"] = s.solver_status;
  j["objective"] = s.objective ? ordered_json(*s.objective) : ordered_json(nullptr);
  return j;
}

AttemptStep step_from_json(const nlohmann::json& j) {
  AttemptStep s;
  s.iteration = j.at("iteration").get<std::size_t>();
  s.raw_output = j.at("raw_output").get<std::string>();
  s.document = j.at("document").get<std::string>();
  s.stage = j.at("stage").get<std::string>();
  s.error_category = j.at("error_category").get<std::string>();
  s.error_code = j.at("error_code").get<std::string>();
  s.error_message = j.at("error_message").get<std::string>();
  s.error_line = j.at("error_line").get<std::size_t>();
  s.error_column = j.at("error_column").get<std::size_t>();
  s.solver_status = j.at("solver_status").get<std::string>();
  if (!j.at("objective").is_null()) s.objective = j.at("objective").get<double>();
  return s;
}

ordered_json report_json(const std::vector<problems::ReportItem>& items) {
  ordered_json a = ordered_json::array();
  for (const auto& r : items) a.push_back({{"key", r.key}, {"label", r.label}, {"value", r.value}, {"unit", r.unit}});
  return a;
}

}  // namespace

std::string to_string(Phase p) {
  for (const auto& [ph, name] : kPhases)
    if (ph == p) return name;
  return "unknown";
}

std::optional<Phase> parse_phase(const std::string& s) {
  for (const auto& [ph, name] : kPhases)
    if (s == name) return ph;
  return std::nullopt;
}

bool is_terminal(Phase p) { return p == Phase::Done || p == Phase::Failed; }

bool is_allowed_transition(Phase from, Phase to) {
  using P = Phase;
  switch (from) {
    case P::AwaitingQuery:
      return to == P::Clarifying || to == P::Eliciting || to == P::NonOptimization || to == P::Failed;
    case P::Clarifying: return to == P::Eliciting || to == P::Clarifying || to == P::Failed;
    case P::Eliciting: return to == P::Eliciting || to == P::Formulating;
    case P::Formulating: return to == P::Debugging || to == P::Explaining || to == P::Failed;
    case P::Debugging: return to == P::Explaining || to == P::Failed;
    case P::Explaining: return to == P::Done;
    case P::NonOptimization:
      return to == P::NonOptimization || to == P::Clarifying || to == P::Eliciting || to == P::Failed;
    case P::Done:
    case P::Failed: return false;
  }
  return false;
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::Solved: return "solved";
    case Outcome::Exhausted: return "exhausted";
    case Outcome::Abandoned: return "abandoned";
  }
  return "unknown";
}

void Session::transition(Phase to) {
  if (!is_allowed_transition(phase, to))
    throw Error("IllegalTransition", "cannot move from " + to_string(phase) + " to " + to_string(to));
  phase = to;
  phase_history.push_back(to);
}

std::optional<problems::ElicitedParams> Session::params() const {
  if (!kind) return std::nullopt;
  try {
    return problems::ElicitedParams::make(*kind, elicited);
  } catch (const ValidationError&) {
    return std::nullopt;
  }
}

ordered_json to_json(const AttemptTrace& t, bool canonical) {
  ordered_json j;
  j["sample"] = t.sample;
  j["debug_iterations"] = t.debug_iterations;
  j["outcome"] = to_string(t.outcome);
  if (!canonical) j["wall_ms"] = t.wall_ms;
  j["steps"] = ordered_json::array();
  for (const auto& s : t.steps) j["steps"].push_back(step_json(s));
  return j;
}

AttemptTrace trace_from_json(const nlohmann::json& j) {
  AttemptTrace t;
  t.sample = j.at("sample").get<std::size_t>();
  t.debug_iterations = j.at("debug_iterations").get<std::size_t>();
  const auto outcome = j.at("outcome").get<std::string>();
  t.outcome = outcome == "solved" ? Outcome::Solved : outcome == "exhausted" ? Outcome::Exhausted : Outcome::Abandoned;
  t.wall_ms = j.value("wall_ms", 0.0);
  for (const auto& s : j.at("steps")) t.steps.push_back(step_from_json(s));
  return t;
}

ordered_json to_json(const Session& s, bool canonical) {
  ordered_json j;
  j["id"] = s.id;
  j["phase"] = to_string(s.phase);
  j["phase_history"] = ordered_json::array();
  for (auto p : s.phase_history) j["phase_history"].push_back(to_string(p));
  j["kind"] = s.kind ? ordered_json(problems::to_string(*s.kind)) : ordered_json(nullptr);
  j["query"] = s.query;
  j["pending"] = s.pending;
  ordered_json el = ordered_json::object();
  if (s.kind) {
    for (const auto& spec : problems::schema(*s.kind).params)
      if (auto it = s.elicited.find(spec.name); it != s.elicited.end())
        el[spec.name] = problems::value_to_json(it->second);
  }
  j["elicited"] = el;
  j["spec_note"] = s.spec_note;
  j["traces"] = ordered_json::array();
  for (const auto& t : s.traces) j["traces"].push_back(to_json(t, canonical));
  if (s.result) {
    const auto& r = *s.result;
    ordered_json rj;
    rj["winner_sample"] = r.winner_sample;
    rj["document"] = r.document;
    rj["instance"] = ir::to_json(r.instance);
    rj["solution"] = lp::to_json(r.solution);
    rj["report"] = report_json(r.report);
    rj["explanation_template"] = r.explanation_template;
    rj["explanation_model"] = opt_string(r.explanation_model);
    rj["explanation_fallback"] = r.explanation_fallback;
    rj["infeasibility_note"] = r.infeasibility_note;
    j["result"] = rj;
  } else {
    j["result"] = nullptr;
  }
  j["failure_code"] = opt_string(s.failure_code);
  j["failure_message"] = opt_string(s.failure_message);
  j["transcript"] = ordered_json::array();
  for (const auto& t : s.transcript) j["transcript"].push_back({{"author", t.author}, {"text", t.text}});
  j["clarify_rounds"] = s.clarify_rounds;
  j["general_replies"] = s.general_replies;
  j["adapter_requests"] = s.adapter_requests;
  j["adapter_completions"] = s.adapter_completions;
  j["solve_completions"] = s.solve_completions;
  if (!canonical) {
    j["created_at"] = s.created_at;
    j["updated_at"] = s.updated_at;
  }
  return j;
}

Session session_from_json(const nlohmann::json& j) {
  Session s;
  try {
    s.id = j.at("id").get<std::string>();
    auto phase = parse_phase(j.at("phase").get<std::string>());
    if (!phase) throw Error("BadSession", "unknown phase");
    s.phase = *phase;
    for (const auto& p : j.at("phase_history")) {
      auto ph = parse_phase(p.get<std::string>());
      if (!ph) throw Error("BadSession", "unknown phase in history");
      s.phase_history.push_back(*ph);
    }
    if (!j.at("kind").is_null()) {
      s.kind = problems::parse_kind(j.at("kind").get<std::string>());
      if (!s.kind) throw Error("BadSession", "unknown kind");
    }
    s.query = j.at("query").get<std::string>();
    s.pending = j.at("pending").get<std::vector<std::string>>();
    if (s.kind) {
      const auto& sch = problems::schema(*s.kind);
      for (const auto& [name, v] : j.at("elicited").items()) {
        const auto* spec = sch.find(name);
        if (!spec) throw Error("BadSession", "unknown parameter " + name);
        s.elicited[name] = problems::value_from_json(*spec, v);
      }
    }
    s.spec_note = j.value("spec_note", "");
    for (const auto& t : j.at("traces")) s.traces.push_back(trace_from_json(t));
    if (!j.at("result").is_null()) {
      const auto& rj = j.at("result");
      SessionResult r;
      r.winner_sample = rj.at("winner_sample").get<std::size_t>();
      r.document = rj.at("document").get<std::string>();
      r.instance = ir::instance_from_json(rj.at("instance"));
      r.solution = lp::solution_from_json(rj.at("solution"));
      for (const auto& it : rj.at("report"))
        r.report.push_back({it.at("key").get<std::string>(), it.at("label").get<std::string>(),
                            it.at("value").get<double>(), it.at("unit").get<std::string>()});
      r.explanation_template = rj.at("explanation_template").get<std::string>();
      r.explanation_model = get_opt_string(rj, "explanation_model");
      r.explanation_fallback = rj.at("explanation_fallback").get<bool>();
      r.infeasibility_note = rj.value("infeasibility_note", "");
      s.result = std::move(r);
    }
    s.failure_code = get_opt_string(j, "failure_code");
    s.failure_message = get_opt_string(j, "failure_message");
    for (const auto& t : j.at("transcript"))
      s.transcript.push_back({t.at("author").get<std::string>(), t.at("text").get<std::string>()});
    s.clarify_rounds = j.at("clarify_rounds").get<std::size_t>();
    s.general_replies = j.at("general_replies").get<std::size_t>();
    s.adapter_requests = j.at("adapter_requests").get<std::size_t>();
    s.adapter_completions = j.at("adapter_completions").get<std::size_t>();
    s.solve_completions = j.at("solve_completions").get<std::size_t>();
    s.created_at = j.value("created_at", std::int64_t{0});
    s.updated_at = j.value("updated_at", std::int64_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw Error("BadSession", std::string("malformed session JSON: ") + e.what());
  }
  return s;
}

}  // namespace ec::pipeline
