#include <random>

#include <gtest/gtest.h>

#include "ec/lower.hpp"
#include "ec/metrics.hpp"
#include "ec/problems.hpp"
#include "test_support.hpp"

using namespace ec;
using namespace ec::metrics;
using problems::ProblemKind;

namespace {

std::array<double, 5> forward_y(double q) {
  std::array<double, 5> y{};
  double rest = 1.0;
  for (int k = 0; k < 4; ++k) {
    y[k] = std::pow(1.0 - q, k) * q;
    rest -= y[k];
  }
  y[4] = rest;
  return y;
}

template <class F>
std::string code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

}  // namespace

TEST(Gap, RatioDefinition) {
  EXPECT_DOUBLE_EQ(optimality_gap(4.2, 4.2), 0.0);
  EXPECT_NEAR(optimality_gap(1.1, 1.0), 0.1, 1e-15);
  EXPECT_NEAR(optimality_gap(4.62, 4.20), 0.10, 1e-12);
  EXPECT_EQ(code_of([] { (void)optimality_gap(1.0, 0.0); }), "NonPositiveOptimum");
  EXPECT_EQ(code_of([] { (void)optimality_gap(1.0, -550.0); }), "NonPositiveOptimum");
}

TEST(Gap, DegradedEvScheduleCostsTenPercentMore) {
  // Forcing 5.25 kWh into the first peak hour moves the plan from 4.20 to 4.62.
  const auto p = problems::reference_params(ProblemKind::EvCharging);
  auto inst = problems::build(p);
  const double v_star = *ir::solve(inst).objective;
  inst.constraints.push_back({ir::LinExpr::var({"x", 0}), ir::Relation::Ge, 5.25, "forced"});
  const double v = *ir::solve(inst).objective;
  EXPECT_NEAR(v, 4.62, 1e-9);
  EXPECT_NEAR(optimality_gap(v, v_star), 0.10, 1e-9);
}

TEST(Gap, ShiftedGapHandlesNonPositiveOptima) {
  EXPECT_DOUBLE_EQ(shifted_gap(1.1, 1.0), optimality_gap(1.1, 1.0));
  EXPECT_DOUBLE_EQ(shifted_gap(-550.0, -550.0), 0.0);
  EXPECT_NEAR(shifted_gap(-549.0, -550.0), 1.0, 1e-12);  // both shifted by 551
  EXPECT_GT(shifted_gap(0.0, 0.0 - 1e-3), 0.0);
}

TEST(Gap, RestrictionsNeverBeatTheOptimum) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coef(-1.0, 1.0), frac(0.0, 1.0);
  std::size_t feasible = 0;
  for (auto kind : {ProblemKind::EvCharging, ProblemKind::BatteryDispatch, ProblemKind::PvSizing,
                    ProblemKind::HvacSetpoint}) {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
      const auto base = problems::build(problems::random_params(kind, seed));
      const auto sol = ir::solve(base);
      ASSERT_EQ(sol.status, lp::Status::Optimal);
      const double v_star = *sol.objective;
      auto inst = base;
      const auto refs = inst.element_refs();
      for (int c = 0; c < 3; ++c) {
        ir::LinExpr e;
        for (const auto& r : refs) e += ir::LinExpr::var(r, coef(rng));
        const double at_opt = e.evaluate(sol.assignment);
        // Half the cuts pass through the current optimum's neighbourhood and
        // tighten it; the other half are slack there.
        const double rhs = c % 2 ? at_opt + 1.0 : at_opt - frac(rng);
        inst.constraints.push_back({e, ir::Relation::Le, rhs, "cut"});
      }
      const auto tight = ir::solve(inst);
      if (tight.status != lp::Status::Optimal) continue;
      ++feasible;
      EXPECT_GE(shifted_gap(*tight.objective, v_star), -1e-7) << problems::to_string(kind) << " seed " << seed;
    }
  }
  EXPECT_GT(feasible, 20u);
}

TEST(Improvement, BaselineRatio) {
  EXPECT_DOUBLE_EQ(improvement_over_baseline(4.2, 4.2), 0.0);
  EXPECT_NEAR(improvement_over_baseline(1.3 * 4.2, 4.2), 0.30, 1e-12);
  EXPECT_NEAR(improvement_over_baseline(1.6 * 4.2, 4.2), 0.60, 1e-12);
  EXPECT_EQ(code_of([] { (void)improvement_over_baseline(1.0, 0.0); }), "NonPositiveValue");
}

TEST(EstimateP, Endpoints) {
  EXPECT_EQ(estimate_p(1.0), 1.0);
  EXPECT_EQ(estimate_p(6.0), 0.0);
  EXPECT_DOUBLE_EQ(expected_generations(1.0), 1.0);
  EXPECT_DOUBLE_EQ(expected_generations(0.0), 6.0);
  EXPECT_EQ(code_of([] { (void)estimate_p(0.99); }), "OutOfRange");
  EXPECT_EQ(code_of([] { (void)estimate_p(6.01); }), "OutOfRange");
}

TEST(EstimateP, FrozenForwardValue) {
  EXPECT_NEAR(expected_generations(0.8), 1.24992, 1e-12);
  EXPECT_NEAR(estimate_p(1.24992), 0.8, 1e-6);
}

TEST(EstimateP, ReportedRatesRoundTrip) {
  for (double p : {0.8, 0.25, 0.38, 0.53, 0.83, 0.38}) EXPECT_NEAR(estimate_p(expected_generations(p)), p, 1e-6);
}

TEST(EstimateP, RoundTripProperty) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(1e-3, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double p = u(rng);
    EXPECT_NEAR(estimate_p(expected_generations(p)), p, 1e-6) << p;
  }
}

TEST(EstimateP, ForwardIsStrictlyDecreasing) {
  double prev = expected_generations(0.0);
  for (int i = 1; i <= 1000; ++i) {
    const double z = expected_generations(i / 1000.0);
    EXPECT_LT(z, prev);
    prev = z;
  }
}

TEST(EstimateQ, RecoversFrozenValue) { EXPECT_DOUBLE_EQ(estimate_q(forward_y(0.26)), 0.26); }

TEST(EstimateQ, Extremes) {
  EXPECT_DOUBLE_EQ(estimate_q({1, 0, 0, 0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(estimate_q({0, 0, 0, 0, 1}), 0.0);
}

TEST(EstimateQ, GridRecovery) {
  for (int i = 0; i <= 100; ++i) {
    const double q = i / 100.0;
    EXPECT_NEAR(estimate_q(forward_y(q)), q, 0.01 + 1e-12) << q;
  }
}

TEST(EstimateQ, DistributionMatchesForwardModel) {
  const auto d = debug_distribution(0.26);
  const auto y = forward_y(0.26);
  for (int k = 0; k < 5; ++k) EXPECT_NEAR(d[k], y[k], 1e-15);
}

TEST(EstimateQ, RejectsUnnormalizedInput) {
  EXPECT_EQ(code_of([] { (void)estimate_q({0.5, 0.2, 0, 0, 0}); }), "BadInput");
  EXPECT_EQ(code_of([] { (void)estimate_q({1.5, -0.5, 0, 0, 0}); }), "BadInput");
}

TEST(Summary, AggregatesPerKind) {
  EvalRecord a, b, c;
  a.kind = b.kind = ProblemKind::EvCharging;
  c.kind = ProblemKind::HeatPump;
  a.compiled = a.correct = a.explained = true;
  a.gap = 0.0;
  a.samples_used = 5;
  a.debug_iterations = 0;
  b.compiled = true;
  b.gap = 0.2;
  b.samples_used = 5;
  b.debug_iterations = 2;
  c.samples_used = 5;
  const auto rows = summarize({a, b, c});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].kind, ProblemKind::EvCharging);
  EXPECT_EQ(rows[0].n, 2u);
  EXPECT_DOUBLE_EQ(rows[0].compiled_rate, 1.0);
  EXPECT_DOUBLE_EQ(rows[0].correct_rate, 0.5);
  EXPECT_NEAR(*rows[0].mean_gap, 0.1, 1e-15);
  EXPECT_DOUBLE_EQ(rows[0].mean_debug_iters, 1.0);
  EXPECT_FALSE(rows[1].mean_gap);
  const auto csv = summary_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "kind,n,compiled_rate,correct_rate,explained_rate,mean_gap,mean_samples,mean_debug_iters");
}

TEST(Summary, HistogramOverRepairedEpisodes) {
  std::vector<EvalRecord> recs(4);
  recs[0].debug_iterations = 0;
  recs[0].generations_to_success = 1;
  recs[0].compiled = true;
  recs[1].debug_iterations = 1;
  recs[1].compiled = true;
  recs[2].debug_iterations = 3;
  recs[2].compiled = true;
  recs[3].debug_iterations = 7;
  recs[3].compiled = true;
  const auto h = histogram(recs);
  EXPECT_EQ(h.episodes, 4u);
  EXPECT_EQ(h.repaired, 3u);
  EXPECT_NEAR(h.y[0], 1.0 / 3, 1e-15);
  EXPECT_NEAR(h.y[2], 1.0 / 3, 1e-15);
  EXPECT_NEAR(h.y[4], 1.0 / 3, 1e-15);
  EXPECT_NEAR(h.z, (1.0 + 6 + 6 + 6) / 4, 1e-15);
}
