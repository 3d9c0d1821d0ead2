#include "ec/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <future>
#include <regex>
#include <sstream>

#include "ec/dsl.hpp"
#include "ec/lower.hpp"
#include "ec/problems.hpp"
#include "ec/scripted_adapter.hpp"

namespace ec::pipeline {

using problems::ElicitedParams;
using problems::ParamError;
using problems::ProblemKind;

namespace {

using Clock = std::chrono::steady_clock;

struct Counters {
  std::atomic<std::size_t> requests{0};
  std::atomic<std::size_t> completions{0};
};

/// Counts locally, then calls the real adapter; a timed-out call may outlive
/// this frame, so the detached worker must never see the counters.
std::vector<std::string> ask(ModelAdapter& adapter, const PipelineConfig& cfg, const PromptRequest& req,
                             std::size_t n, Counters& c) {
  ++c.requests;
  c.completions += n;
  return call_with_timeout(adapter, req, n, cfg.adapter_timeout);
}

PromptRequest make_request(const PipelineConfig& cfg, Role role, std::map<std::string, std::string> vars,
                           std::size_t sample = 0, std::size_t iteration = 0) {
  PromptRequest r;
  r.role = role;
  r.text = cfg.prompts.render(to_string(role), vars);
  r.sample = sample;
  r.iteration = iteration;
  r.vars = std::move(vars);
  return r;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::int64_t now_seconds() {
  return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

constexpr const char* kLabels[] = {"ev_charging", "hvac",      "battery_dispatch", "pv_sizing",
                                   "heat_pump",   "battery_sizing", "optimization", "general"};

std::optional<std::string> parse_label(const std::string& raw) {
  std::string t = lower(trim(raw));
  auto strip = [](char c) { return c == '`' || c == '"' || c == '\'' || c == '.' || c == '*'; };
  while (!t.empty() && strip(t.front())) t.erase(t.begin());
  while (!t.empty() && strip(t.back())) t.pop_back();
  t = trim(t);
  for (const char* l : kLabels)
    if (t == l) return std::string(l);
  return std::nullopt;
}

std::string fmt_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string kind_menu() {
  std::string out;
  std::size_t i = 0;
  for (auto k : problems::kAllKinds) out += "\n" + std::to_string(++i) + ". " + problems::title(k);
  return out;
}

// ---- conversation steps ----------------------------------------------------

class Engine {
 public:
  Engine(Session& s, ModelAdapter& adapter, const PipelineConfig& cfg) : s_(s), adapter_(adapter), cfg_(cfg) {}

  std::string on_query(const std::string& message);
  std::string on_clarify(const std::string& message);
  std::string on_answers(const std::string& message);
  std::string recap() const;
  std::string start_elicitation(const std::string& text);
  std::string run_solve(const ElicitedParams& params);

  Counters counters;
  Counters solve_counters;

 private:
  std::optional<std::string> classify(const std::string& query);
  std::string fail(const std::string& code, const std::string& message);
  std::string ask_pending(const std::vector<FieldIssue>& issues);
  std::string finish_elicitation();
  std::string enter_kind(ProblemKind kind, const std::string& text);

  Session& s_;
  ModelAdapter& adapter_;
  const PipelineConfig& cfg_;
};

std::optional<std::string> Engine::classify(const std::string& query) {
  for (std::size_t attempt = 0; attempt < 2; ++attempt) {
    auto req = make_request(cfg_, Role::Classification, {{"query", query}}, 0, attempt);
    auto label = parse_label(ask(adapter_, cfg_, req, 1, counters).front());
    if (label) return label;
  }
  return std::nullopt;
}

std::string Engine::fail(const std::string& code, const std::string& message) {
  s_.transition(Phase::Failed);
  s_.failure_code = code;
  s_.failure_message = message;
  return "Sorry, I could not finish this request (" + code + "): " + message;
}

std::string Engine::on_query(const std::string& message) {
  auto label = classify(message);
  if (!label) return fail("MalformedClassification", "the classifier did not return a known label twice in a row");
  s_.query = message;
  if (auto kind = problems::parse_kind(*label); kind && *label != "optimization" && *label != "general")
    return enter_kind(*kind, message);
  if (*label == "optimization") {
    s_.transition(Phase::Clarifying);
    s_.clarify_rounds = 1;
    return "That sounds like a decision I might be able to optimize. Which of these is closest?" + kind_menu();
  }
  auto req = make_request(cfg_, Role::General, {{"query", message}}, 0, s_.general_replies);
  std::string reply;
  try {
    reply = ask(adapter_, cfg_, req, 1, counters).front();
  } catch (const AdapterTimeout&) {
    throw;
  } catch (const Error&) {
    reply = "I can work out concrete decisions with numbers:" + kind_menu();
  }
  s_.transition(Phase::NonOptimization);
  ++s_.general_replies;
  return reply;
}

std::string Engine::on_clarify(const std::string& message) {
  const std::string t = trim(message);
  std::optional<ProblemKind> kind = problems::parse_kind(t);
  if (t.size() == 1 && t[0] >= '1' && t[0] <= '6') kind = problems::kAllKinds[t[0] - '1'];
  if (!kind) kind = problems::parse_kind(keyword_label(message));
  if (kind) return enter_kind(*kind, s_.query + "\n" + message);
  if (s_.clarify_rounds >= cfg_.clarify_limit)
    return fail("UnresolvedKind", "the problem type stayed unclear after " + std::to_string(s_.clarify_rounds) +
                                      " clarification rounds");
  s_.transition(Phase::Clarifying);
  ++s_.clarify_rounds;
  return "I still could not tell which decision you mean. Please pick one:" + kind_menu();
}

std::string Engine::enter_kind(ProblemKind kind, const std::string& text) {
  s_.kind = kind;
  s_.transition(Phase::Eliciting);
  return start_elicitation(text);
}

std::string Engine::start_elicitation(const std::string& text) {
  const auto& sch = problems::schema(*s_.kind);
  // Explicit "name = value" lines in the request itself are taken as answers.
  std::vector<FieldIssue> issues;
  for (const auto& [name, answer] : split_answers(sch, {}, text)) {
    const auto* spec = sch.find(name);
    try {
      s_.elicited[name] = problems::parse_answer(*spec, answer);
    } catch (const ValidationError& e) {
      issues.insert(issues.end(), e.issues().begin(), e.issues().end());
    }
  }
  s_.pending.clear();
  for (const auto* spec : sch.questions())
    if (!s_.elicited.count(spec->name)) s_.pending.push_back(spec->name);
  if (s_.pending.empty()) return finish_elicitation();
  return ask_pending(issues);
}

std::string Engine::ask_pending(const std::vector<FieldIssue>& issues) {
  const auto& sch = problems::schema(*s_.kind);
  std::string questions;
  for (std::size_t i = 0; i < s_.pending.size(); ++i) {
    const auto* spec = sch.find(s_.pending[i]);
    const std::string q = spec && spec->asked() ? spec->question : "What value should " + s_.pending[i] + " take?";
    questions += std::to_string(i + 1) + ". " + q + "\n";
  }
  std::string intro;
  const auto batch = static_cast<std::size_t>(
      std::count(s_.phase_history.begin(), s_.phase_history.end(), Phase::Eliciting));
  try {
    auto req = make_request(cfg_, Role::Elicitation,
                            {{"kind_title", problems::title(*s_.kind)}, {"questions", questions}, {"query", s_.query}},
                            0, batch == 0 ? 0 : batch - 1);
    intro = trim(ask(adapter_, cfg_, req, 1, counters).front());
  } catch (const Error&) {
    intro.clear();  // the numbered questions stand on their own
  }
  std::string out;
  if (!issues.empty()) {
    out += "Some answers could not be used:\n";
    for (const auto& i : issues) out += "- " + i.field + ": " + i.message + "\n";
  }
  if (!intro.empty()) out += intro + "\n";
  out += questions;
  return trim(out);
}

std::string Engine::on_answers(const std::string& message) {
  const auto& sch = problems::schema(*s_.kind);
  std::vector<FieldIssue> issues;
  for (const auto& [name, answer] : split_answers(sch, s_.pending, message)) {
    const auto* spec = sch.find(name);
    if (problems::is_default_request(answer)) {
      if (spec->default_value) s_.elicited[name] = *spec->default_value;
      else issues.push_back({name, "has no default; please give a value"});
      continue;
    }
    try {
      s_.elicited[name] = problems::parse_answer(*spec, answer);
    } catch (const ValidationError& e) {
      s_.elicited.erase(name);
      issues.insert(issues.end(), e.issues().begin(), e.issues().end());
    }
  }
  std::vector<std::string> still;
  for (const auto& name : s_.pending)
    if (!s_.elicited.count(name)) still.push_back(name);
  s_.pending = std::move(still);
  if (!s_.pending.empty()) {
    s_.transition(Phase::Eliciting);
    return ask_pending(issues);
  }
  return finish_elicitation();
}

std::string Engine::finish_elicitation() {
  const auto& sch = problems::schema(*s_.kind);
  auto reask = [&](std::vector<std::string> fields, std::vector<FieldIssue> issues) {
    for (const auto& f : fields) s_.elicited.erase(f);
    s_.pending.clear();
    for (const auto& spec : sch.params)
      if (std::find(fields.begin(), fields.end(), spec.name) != fields.end()) s_.pending.push_back(spec.name);
    s_.transition(Phase::Eliciting);
    return ask_pending(issues);
  };
  std::optional<ElicitedParams> params;
  try {
    params = ElicitedParams::make(*s_.kind, s_.elicited);
  } catch (const ValidationError& e) {
    std::vector<std::string> fields;
    for (const auto& i : e.issues()) fields.push_back(i.field);
    return reask(fields, e.issues());
  }
  try {
    (void)problems::build(*params);
  } catch (const ParamError& e) {
    if (e.code() != "InfeasibleSpec") {
      std::vector<FieldIssue> issues;
      for (const auto& f : e.fields()) issues.push_back({f, e.what()});
      return reask(e.fields(), issues);
    }
    s_.spec_note = e.what();
  }
  return run_solve(*params);
}

// ---- formulation, repair, explanation --------------------------------------

struct Candidate {
  AttemptTrace trace;
  Evaluation last;
  Clock::time_point start;
};

std::map<std::string, std::string> base_vars(const ElicitedParams& p, const std::string& query) {
  return {{"kind", problems::to_string(p.kind())},
          {"kind_title", problems::title(p.kind())},
          {"params_json", problems::to_json(p).dump()},
          {"params_table", params_table(p)},
          {"query", query}};
}

Evaluation adapter_failure(const Error& e, std::size_t iteration) {
  Evaluation ev;
  ev.step.iteration = iteration;
  ev.step.stage = "adapter";
  ev.step.error_category = "Adapter";
  ev.step.error_code = e.code();
  ev.step.error_message = e.what();
  return ev;
}

std::string Engine::run_solve(const ElicitedParams& params) {
  s_.transition(Phase::Formulating);
  const auto vars = base_vars(params, s_.query);
  const auto t0 = Clock::now();

  std::vector<Candidate> cands(cfg_.samples);
  std::vector<std::string> outputs;
  std::optional<Evaluation> call_failure;
  try {
    auto req = make_request(cfg_, Role::Formulation, vars, 0, 0);
    outputs = ask(adapter_, cfg_, req, cfg_.samples, solve_counters);
  } catch (const Error& e) {
    call_failure = adapter_failure(e, 0);
  }
  {
    std::vector<std::future<Evaluation>> futs;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      cands[i].trace.sample = i;
      cands[i].start = t0;
      if (!call_failure) futs.push_back(std::async(std::launch::async, evaluate_candidate, outputs[i], 0));
    }
    for (std::size_t i = 0; i < cands.size(); ++i) {
      cands[i].last = call_failure ? *call_failure : futs[i].get();
      cands[i].trace.steps.push_back(cands[i].last.step);
    }
  }

  auto winner_of = [&]() -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < cands.size(); ++i)
      if (cands[i].last.step.succeeded()) return i;
    return std::nullopt;
  };
  std::optional<std::size_t> winner = winner_of();
  if (!winner) s_.transition(Phase::Debugging);

  for (std::size_t round = 1; !winner && round <= cfg_.max_debug; ++round) {
    std::vector<std::future<Evaluation>> futs;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      const auto& step = cands[i].last.step;
      auto dv = vars;
      dv["document"] = step.document.empty() ? step.raw_output : step.document;
      dv["error_category"] = step.error_category;
      dv["error_code"] = step.error_code;
      dv["error_message"] = step.error_message;
      dv["error_line"] = std::to_string(step.error_line);
      dv["error_column"] = std::to_string(step.error_column);
      auto req = make_request(cfg_, Role::Debug, std::move(dv), i, round);
      futs.push_back(std::async(std::launch::async, [this, req, round]() {
        std::string raw;
        try {
          raw = ask(adapter_, cfg_, req, 1, solve_counters).front();
        } catch (const Error& e) {
          return adapter_failure(e, round);
        }
        return evaluate_candidate(raw, round);
      }));
    }
    for (std::size_t i = 0; i < cands.size(); ++i) {
      cands[i].last = futs[i].get();
      cands[i].trace.steps.push_back(cands[i].last.step);
      cands[i].trace.debug_iterations = round;
    }
    winner = winner_of();
  }

  const double wall = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  s_.traces.clear();
  for (auto& c : cands) {
    c.trace.wall_ms = wall;
    c.trace.outcome = c.last.step.succeeded() ? Outcome::Solved : winner ? Outcome::Abandoned : Outcome::Exhausted;
    s_.traces.push_back(c.trace);
  }
  if (!winner) {
    const auto& last = cands.front().last.step;
    return fail("AllCandidatesExhausted",
                "no formulation compiled and solved after " + std::to_string(cfg_.max_debug) +
                    " repair rounds (last error of candidate 0: " + last.error_code + ": " + last.error_message + ")");
  }

  s_.transition(Phase::Explaining);
  const auto& win = cands[*winner].last;
  SessionResult r;
  r.winner_sample = *winner;
  r.document = win.step.document;
  r.instance = *win.instance;
  r.solution = *win.solution;
  try {
    r.report = problems::report(params, r.solution);
  } catch (const std::exception&) {
    r.report.clear();  // candidate used unexpected names; the table still shows everything
  }
  if (r.solution.status == lp::Status::Infeasible) {
    std::string note = s_.spec_note;
    auto relax = relaxation_candidates(r.instance);
    if (!relax.empty()) {
      if (!note.empty()) note += "\n";
      note += "Feasibility returns if any one of these is relaxed:";
      for (const auto& x : relax) note += " " + x + ";";
      note.pop_back();
    }
    r.infeasibility_note = note;
  }
  r.explanation_template = template_explanation(params, r.instance, r.solution, r.report, r.infeasibility_note);
  try {
    auto ev = vars;
    ev["document"] = r.document;
    ev["solution_summary"] = r.explanation_template;
    auto req = make_request(cfg_, Role::Explanation, std::move(ev), 0, 0);
    r.explanation_model = ask(adapter_, cfg_, req, 1, solve_counters).front();
  } catch (const Error&) {
    r.explanation_fallback = true;
  }
  s_.result = std::move(r);
  s_.transition(Phase::Done);
  const auto& res = *s_.result;
  return res.explanation_model ? *res.explanation_model : res.explanation_template;
}

std::string Engine::recap() const {
  if (s_.phase == Phase::Done && s_.result) {
    const auto& r = *s_.result;
    std::string out = "This conversation is complete. " + r.explanation_template.substr(0, r.explanation_template.find('\n'));
    if (r.solution.objective) out += "\nObjective value: " + fmt_value(*r.solution.objective);
    for (const auto& item : r.report) out += "\n- " + item.label + ": " + fmt_value(item.value) + " " + item.unit;
    return out + "\nStart a new session for another question.";
  }
  return "This conversation has ended (" + s_.failure_code.value_or("Failed") + "): " +
         s_.failure_message.value_or("") + " Start a new session to try again.";
}

}  // namespace

// ---- public API ------------------------------------------------------------

void PipelineConfig::check() const {
  if (samples < 1 || samples > 8) throw Error("BadConfig", "samples must be between 1 and 8");
  if (max_debug > 20) throw Error("BadConfig", "max_debug must be at most 20");
  if (adapter_timeout.count() < 0) throw Error("BadConfig", "adapter timeout must not be negative");
  if (clarify_limit < 1) throw Error("BadConfig", "clarify_limit must be at least 1");
}

std::size_t max_solve_completions(const PipelineConfig& cfg) { return 1 + cfg.samples * (1 + cfg.max_debug); }

Session new_session(std::string id) {
  Session s;
  s.id = std::move(id);
  s.phase_history.push_back(Phase::AwaitingQuery);
  s.created_at = s.updated_at = now_seconds();
  return s;
}

std::string respond(Session& session, const std::string& message, ModelAdapter& adapter,
                    const PipelineConfig& cfg) {
  cfg.check();
  Session work = session;
  Engine engine(work, adapter, cfg);
  work.transcript.push_back({"user", message});
  std::string reply;
  switch (work.phase) {
    case Phase::AwaitingQuery:
    case Phase::NonOptimization: reply = engine.on_query(message); break;
    case Phase::Clarifying: reply = engine.on_clarify(message); break;
    case Phase::Eliciting: reply = engine.on_answers(message); break;
    case Phase::Done:
    case Phase::Failed: reply = engine.recap(); break;
    default: throw Error("IllegalTransition", "session is in transient phase " + to_string(work.phase));
  }
  work.transcript.push_back({"concierge", reply});
  work.adapter_requests += engine.counters.requests + engine.solve_counters.requests;
  work.adapter_completions += engine.counters.completions + engine.solve_counters.completions;
  work.solve_completions += engine.solve_counters.completions;
  work.updated_at = now_seconds();
  session = std::move(work);
  return reply;
}

Session solve_direct(const ElicitedParams& params, ModelAdapter& adapter, const PipelineConfig& cfg,
                     std::string id, std::string query) {
  cfg.check();
  Session s = new_session(std::move(id));
  s.kind = params.kind();
  s.query = query.empty() ? "Solve a " + lower(problems::title(params.kind())) + " problem." : std::move(query);
  s.elicited = params.values();
  try {
    (void)problems::build(params);
  } catch (const ParamError& e) {
    if (e.code() != "InfeasibleSpec") throw;
    s.spec_note = e.what();
  }
  s.transition(Phase::Eliciting);
  Engine engine(s, adapter, cfg);
  const std::string reply = engine.run_solve(params);
  s.transcript.push_back({"user", s.query});
  s.transcript.push_back({"concierge", reply});
  s.adapter_requests += engine.solve_counters.requests;
  s.adapter_completions += engine.solve_counters.completions;
  s.solve_completions += engine.solve_counters.completions;
  s.updated_at = now_seconds();
  return s;
}

Evaluation evaluate_candidate(const std::string& raw_output, std::size_t iteration) {
  Evaluation ev;
  auto& step = ev.step;
  step.iteration = iteration;
  step.raw_output = raw_output;
  step.stage = "extract";
  try {
    step.document = raw_output.find("```") != std::string::npos ? dsl::extract_block(raw_output) : raw_output;
    step.stage = "parse";
    const auto doc = dsl::parse(step.document);
    step.stage = "compile";
    ev.instance = dsl::compile(doc);
    step.stage = "solve";
    ev.solution = ir::solve(*ev.instance);
    step.solver_status = lp::to_string(ev.solution->status);
    if (ev.solution->status == lp::Status::Unbounded) {
      step.error_category = "Solver";
      step.error_code = "Unbounded";
      step.error_message = "the objective decreases without limit; a bound or constraint is missing";
      return ev;
    }
    step.objective = ev.solution->objective;
    step.stage = "ok";
  } catch (const dsl::DslError& e) {
    step.error_category = dsl::to_string(e.category());
    step.error_code = dsl::to_string(e.error_code());
    step.error_message = e.what();
    step.error_line = e.span().line;
    step.error_column = e.span().column;
  } catch (const Error& e) {
    step.error_category = step.stage == "solve" ? "Solver" : "Semantic";
    step.error_code = e.code();
    step.error_message = e.what();
  }
  return ev;
}

std::string params_table(const ElicitedParams& p) {
  std::ostringstream out;
  for (const auto& spec : problems::schema(p.kind()).params) {
    auto it = p.values().find(spec.name);
    if (it == p.values().end()) continue;
    out << "- " << spec.name;
    if (!spec.unit.empty()) out << " (" << spec.unit << ")";
    out << ": ";
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, double>) out << dsl::format_number(v);
          else if constexpr (std::is_same_v<T, std::int64_t>) out << v;
          else if constexpr (std::is_same_v<T, problems::Interval>)
            out << dsl::format_number(v.lo) << " to " << dsl::format_number(v.hi);
          else if constexpr (std::is_same_v<T, std::string>) out << v;
          else {
            out << "[";
            for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ", " : "") << dsl::format_number(v[i]);
            out << "]";
          }
        },
        it->second);
    out << "\n";
  }
  return out.str();
}

std::vector<std::pair<std::string, std::string>> split_answers(const problems::ParamSchema& schema,
                                                               const std::vector<std::string>& pending,
                                                               const std::string& message) {
  static const std::regex named(R"(^\s*([A-Za-z_][A-Za-z0-9_]*)\s*[:=]\s*(.+?)\s*$)");
  static const std::regex bullet(R"(^\s*(\d+)[.)]\s+(.+?)\s*$)");

  std::vector<std::pair<std::string, std::string>> out;
  std::vector<std::string> rest;
  std::istringstream in(message);
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::smatch m;
    if (std::regex_match(line, m, named)) {
      const std::string name = lower(m[1].str());
      if (schema.find(name)) {
        out.emplace_back(name, m[2].str());
        continue;
      }
    }
    rest.push_back(trim(line));
  }
  if (rest.empty() || pending.empty()) return out;

  std::vector<std::string> remaining;
  for (const auto& p : pending)
    if (std::none_of(out.begin(), out.end(), [&](const auto& a) { return a.first == p; })) remaining.push_back(p);
  if (remaining.empty()) return out;

  std::vector<std::pair<std::size_t, std::string>> bullets;
  for (const auto& r : rest) {
    std::smatch m;
    if (!std::regex_match(r, m, bullet)) break;
    bullets.emplace_back(std::stoul(m[1].str()), m[2].str());
  }
  if (bullets.size() == rest.size()) {
    for (const auto& [k, text] : bullets)
      if (k >= 1 && k <= pending.size()) out.emplace_back(pending[k - 1], text);
    return out;
  }
  if (rest.size() == remaining.size() && rest.size() > 1) {
    for (std::size_t i = 0; i < rest.size(); ++i) out.emplace_back(remaining[i], rest[i]);
    return out;
  }
  std::string joined;
  for (const auto& r : rest) joined += (joined.empty() ? "" : " ") + r;
  out.emplace_back(remaining.front(), joined);
  return out;
}

}  // namespace ec::pipeline
