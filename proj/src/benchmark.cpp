#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <thread>

#include "ec/metrics.hpp"
#include "ec/problems.hpp"
#include "ec/scripted_adapter.hpp"

namespace ec::metrics {

namespace {

constexpr double kFeasibleTol = 1e-6;

EvalRecord run_episode(const nlohmann::json& script, problems::ProblemKind kind, std::size_t index,
                       const BenchmarkConfig& cfg) {
  EvalRecord rec;
  rec.kind = kind;
  rec.index = index;
  rec.seed = cfg.seed * 1000003ULL + index;
  const auto params = problems::random_params(kind, rec.seed);
  const auto truth = problems::build(params);
  rec.v_star = problems::oracle(params).objective;
  if (script.contains("baselines") && script.at("baselines").contains(problems::to_string(kind)))
    rec.v_b = script.at("baselines").at(problems::to_string(kind)).get<double>();

  pipeline::ScriptedAdapter adapter(script);
  const auto s = pipeline::solve_direct(params, adapter, cfg.pipeline,
                                        problems::to_string(kind) + "-" + std::to_string(index));
  rec.phase = pipeline::to_string(s.phase);
  rec.failure_code = s.failure_code.value_or("");
  rec.adapter_completions = s.adapter_completions;

  for (const auto& t : s.traces)
    if (!t.steps.empty() && t.steps.front().succeeded()) {
      rec.generations_to_success = std::min<std::size_t>(t.sample + 1, 6);
      break;
    }
  rec.samples_used = std::min(rec.generations_to_success, cfg.pipeline.samples);
  if (s.result) {
    const auto& r = *s.result;
    rec.compiled = true;
    rec.explained = r.explanation_model.has_value() && !r.explanation_model->empty();
    rec.debug_iterations = s.traces.at(r.winner_sample).debug_iterations;
    if (r.solution.status == lp::Status::Optimal && truth.max_violation(r.solution.assignment) <= kFeasibleTol) {
      rec.v = truth.objective_value(r.solution.assignment);
      rec.gap = shifted_gap(*rec.v, *rec.v_star);
      rec.correct = std::abs(*rec.gap) <= cfg.tolerance;
      if (rec.v_b && *rec.v > 0.0) rec.improvement = improvement_over_baseline(*rec.v_b, *rec.v);
    }
  } else {
    rec.debug_iterations = cfg.pipeline.max_debug;
  }
  return rec;
}

}  // namespace

BenchmarkResult run_benchmark(const BenchmarkConfig& cfg) {
  cfg.pipeline.check();
  if (cfg.n_per_kind < 1) throw Error("BadConfig", "n_per_kind must be at least 1");
  std::ifstream f(cfg.script);
  if (!f) throw Error("ScriptMissing", "cannot open script " + cfg.script.string());
  nlohmann::json script;
  try {
    f >> script;
  } catch (const nlohmann::json::exception& e) {
    throw Error("BadScript", cfg.script.string() + ": " + e.what());
  }
  pipeline::ScriptedAdapter validate(script);  // shape errors surface before any episode runs

  std::vector<std::pair<problems::ProblemKind, std::size_t>> jobs;
  const auto kinds = cfg.kinds.empty() ? std::vector<problems::ProblemKind>(std::begin(problems::kAllKinds),
                                                                            std::end(problems::kAllKinds))
                                       : cfg.kinds;
  for (auto k : kinds)
    for (std::size_t i = 0; i < cfg.n_per_kind; ++i) jobs.emplace_back(k, i);

  BenchmarkResult result;
  result.records.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr first_error;
  const std::size_t workers =
      std::max<std::size_t>(1, std::min(jobs.size(), cfg.threads ? cfg.threads : std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t j; (j = next++) < jobs.size();) {
        try {
          result.records[j] = run_episode(script, jobs[j].first, jobs[j].second, cfg);
        } catch (...) {
          std::lock_guard lock(err_mu);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);

  std::sort(result.records.begin(), result.records.end(), [](const EvalRecord& a, const EvalRecord& b) {
    return std::pair(static_cast<int>(a.kind), a.index) < std::pair(static_cast<int>(b.kind), b.index);
  });
  result.summary = summarize(result.records);
  result.histogram = histogram(result.records);
  if (result.histogram.episodes) result.p_hat = estimate_p(result.histogram.z);
  if (result.histogram.repaired) result.q_hat = estimate_q(result.histogram.y);
  return result;
}

void write_benchmark(const BenchmarkResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw Error("WriteFailed", "cannot write " + (dir / name).string());
    return out;
  };
  open("summary.csv") << summary_csv(result.summary);
  {
    auto out = open("records.jsonl");
    for (const auto& r : result.records) out << to_json(r).dump() << "\n";
  }
  open("estimates.json") << estimates_json(result).dump(2) << "\n";
}

}  // namespace ec::metrics
