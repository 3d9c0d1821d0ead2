#include <chrono>

#include <gtest/gtest.h>

#include "ec/metrics.hpp"
#include "test_support.hpp"

using namespace ec;
using namespace ec::metrics;

namespace {

BenchmarkConfig config(const char* script, std::size_t n = 20) {
  BenchmarkConfig cfg;
  cfg.kinds.assign(std::begin(problems::kAllKinds), std::end(problems::kAllKinds));
  cfg.n_per_kind = n;
  cfg.script = test::fixture(std::string("scripts/") + script);
  cfg.seed = 1;
  return cfg;
}

}  // namespace

TEST(Benchmark, GoldenScriptIsPerfect) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto res = run_benchmark(config("golden.json"));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_LT(secs, 60.0);
  ASSERT_EQ(res.records.size(), 120u);
  ASSERT_EQ(res.summary.size(), 6u);
  for (const auto& row : res.summary) {
    EXPECT_EQ(row.n, 20u);
    EXPECT_DOUBLE_EQ(row.compiled_rate, 1.0) << problems::to_string(row.kind);
    EXPECT_DOUBLE_EQ(row.correct_rate, 1.0) << problems::to_string(row.kind);
    ASSERT_TRUE(row.mean_gap);
    EXPECT_NEAR(*row.mean_gap, 0.0, 1e-6);
    EXPECT_DOUBLE_EQ(row.mean_debug_iters, 0.0);
  }
  EXPECT_DOUBLE_EQ(res.histogram.z, 1.0);
  ASSERT_TRUE(res.p_hat);
  EXPECT_EQ(*res.p_hat, 1.0);
}

TEST(Benchmark, RecordsAreSortedAndConsistent) {
  const auto res = run_benchmark(config("golden.json", 3));
  for (std::size_t i = 1; i < res.records.size(); ++i) {
    const auto& a = res.records[i - 1];
    const auto& b = res.records[i];
    EXPECT_TRUE(a.kind < b.kind || (a.kind == b.kind && a.index < b.index));
  }
  for (const auto& r : res.records) {
    ASSERT_TRUE(r.v && r.v_star);
    EXPECT_GE(*r.v, *r.v_star - 1e-6 * std::max(1.0, std::abs(*r.v_star)));
    EXPECT_EQ(r.phase, "done");
    EXPECT_TRUE(r.explained);
  }
}

TEST(Benchmark, FixedSeedGivesIdenticalSummary) {
  auto cfg = config("golden.json", 5);
  cfg.threads = 4;
  const auto a = summary_csv(run_benchmark(cfg).summary);
  cfg.threads = 1;
  const auto b = summary_csv(run_benchmark(cfg).summary);
  EXPECT_EQ(a, b);
}

TEST(Benchmark, OneSyntaxFailureCostsOneRepairRound) {
  const auto res = run_benchmark(config("one_syntax_failure.json", 10));
  for (const auto& row : res.summary) {
    EXPECT_DOUBLE_EQ(row.compiled_rate, 1.0);
    EXPECT_DOUBLE_EQ(row.mean_debug_iters, 1.0) << problems::to_string(row.kind);
  }
  EXPECT_EQ(res.histogram.repaired, 60u);
  EXPECT_DOUBLE_EQ(res.histogram.y[0], 1.0);
  ASSERT_TRUE(res.q_hat);
  EXPECT_DOUBLE_EQ(*res.q_hat, 1.0);
  EXPECT_DOUBLE_EQ(res.histogram.z, 6.0);
}

TEST(Benchmark, ProseScriptRecordsFailures) {
  auto cfg = config("all_prose.json", 2);
  cfg.kinds = {problems::ProblemKind::EvCharging};
  const auto res = run_benchmark(cfg);
  ASSERT_EQ(res.records.size(), 2u);
  for (const auto& r : res.records) {
    EXPECT_FALSE(r.compiled);
    EXPECT_FALSE(r.correct);
    EXPECT_EQ(r.failure_code, "AllCandidatesExhausted");
    EXPECT_EQ(r.generations_to_success, 6u);
  }
}

TEST(Benchmark, MissingScriptAndBadConfig) {
  try {
    (void)run_benchmark(config("missing.json", 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "ScriptMissing");
  }
  EXPECT_THROW((void)run_benchmark(config("golden.json", 0)), Error);
}

TEST(Benchmark, WritesOutputFiles) {
  const auto res = run_benchmark(config("golden.json", 2));
  const auto dir = std::filesystem::temp_directory_path() / "ec_bench_out";
  std::filesystem::remove_all(dir);
  write_benchmark(res, dir);
  const auto csv = test::read_text(dir / "summary.csv");
  EXPECT_EQ(csv, summary_csv(res.summary));
  const auto lines = test::read_text(dir / "records.jsonl");
  EXPECT_EQ(static_cast<std::size_t>(std::count(lines.begin(), lines.end(), '\n')), 12u);
  const auto est = test::read_json(dir / "estimates.json");
  EXPECT_EQ(est.at("episodes"), 12);
  std::filesystem::remove_all(dir);
}
