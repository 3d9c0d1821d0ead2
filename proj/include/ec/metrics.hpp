#pragma once

// Evaluation metrics, success-probability estimators and the batch harness.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ec/params.hpp"
#include "ec/pipeline.hpp"

namespace ec::metrics {

/// v / v_star - 1. Throws Error("NonPositiveOptimum") when v_star <= 0.
double optimality_gap(double v, double v_star);

/// Gap after shifting both values by 1 - v_star when v_star <= 0, so that
/// problems with non-positive optima (savings written as negative cost) stay
/// measurable. Equals optimality_gap when v_star > 0.
double shifted_gap(double v, double v_star);

/// v_b / v - 1. Throws Error("NonPositiveValue") when v <= 0.
double improvement_over_baseline(double v_b, double v);

/// Expected generations under a success probability p per try, capped at
/// five tries with failures coded 6.
double expected_generations(double p);

/// Inverts expected_generations by bisection (1e-9). Throws Error("OutOfRange")
/// for z outside [1, 6].
double estimate_p(double z);

/// Model frequencies of needing 1..5 debug rounds (last bucket is ">= 5").
std::array<double, 5> debug_distribution(double q);

/// Grid search over q in {0, 0.01, ..., 1} minimizing squared error against
/// y, ties to the smaller q. Throws Error("BadInput") unless y is
/// non-negative and sums to 1 within 1e-9.
double estimate_q(const std::array<double, 5>& y);

struct SuccessHistogram {
  std::array<double, 5> y{};  // share of repaired episodes needing 1..5(+) rounds
  std::size_t repaired = 0;   // episodes that needed at least one round
  double z = 0.0;             // mean generations to success
  std::size_t episodes = 0;
};

struct EvalRecord {
  problems::ProblemKind kind = problems::ProblemKind::EvCharging;
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::string phase;         // final session phase
  std::string failure_code;  // empty unless Failed
  bool compiled = false;
  bool correct = false;
  bool explained = false;
  std::optional<double> v;       // true objective at the candidate's plan
  std::optional<double> v_star;  // oracle optimum
  std::optional<double> v_b;     // baseline objective, when scripted
  std::optional<double> gap;
  std::optional<double> improvement;
  std::size_t samples_used = 0;
  std::size_t debug_iterations = 0;
  std::size_t generations_to_success = 6;  // 1..5, or 6 when round zero failed
  std::size_t adapter_completions = 0;
};

nlohmann::ordered_json to_json(const EvalRecord& r);

struct SummaryRow {
  problems::ProblemKind kind;
  std::size_t n = 0;
  double compiled_rate = 0.0;
  double correct_rate = 0.0;
  double explained_rate = 0.0;
  std::optional<double> mean_gap;
  double mean_samples = 0.0;
  double mean_debug_iters = 0.0;
};

std::vector<SummaryRow> summarize(const std::vector<EvalRecord>& records);
std::string summary_csv(const std::vector<SummaryRow>& rows);
SuccessHistogram histogram(const std::vector<EvalRecord>& records);

struct BenchmarkConfig {
  std::vector<problems::ProblemKind> kinds;
  std::size_t n_per_kind = 20;
  std::filesystem::path script;
  std::uint64_t seed = 1;
  double tolerance = 1e-6;
  std::size_t threads = 0;  // 0 picks the hardware concurrency
  pipeline::PipelineConfig pipeline;
};

struct BenchmarkResult {
  std::vector<EvalRecord> records;  // sorted by (kind, index)
  std::vector<SummaryRow> summary;
  SuccessHistogram histogram;
  std::optional<double> p_hat;
  std::optional<double> q_hat;
};

/// Runs n_per_kind scripted episodes per kind. Throws Error("ScriptMissing")
/// when the script cannot be read.
BenchmarkResult run_benchmark(const BenchmarkConfig& cfg);

/// Writes summary.csv, records.jsonl and estimates.json into `dir`.
void write_benchmark(const BenchmarkResult& result, const std::filesystem::path& dir);

nlohmann::ordered_json estimates_json(const BenchmarkResult& result);

}  // namespace ec::metrics
