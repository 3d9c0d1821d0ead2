#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "ec/lower.hpp"
#include "ec/problems.hpp"
#include "test_support.hpp"

using namespace ec;
using namespace ec::problems;
using test::ref_with;

namespace {

double solved(const ElicitedParams& p) {
  const auto s = ir::solve(build(p));
  EXPECT_EQ(s.status, lp::Status::Optimal);
  return s.objective.value_or(NAN);
}

double report_value(const ElicitedParams& p, const std::string& key) {
  const auto s = ir::solve(build(p));
  for (const auto& item : report(p, s))
    if (item.key == key) return item.value;
  ADD_FAILURE() << "no report item " << key;
  return NAN;
}

std::string builder_error(const ElicitedParams& p) {
  try {
    (void)build(p);
  } catch (const ParamError& e) {
    return e.code();
  }
  return "none";
}

}  // namespace

// ---- reference values --------------------------------------------------------

TEST(EvCharging, ReferenceCostAndPeakZeros) {
  const auto p = reference_params(ProblemKind::EvCharging);
  const auto s = ir::solve(build(p));
  ASSERT_EQ(s.status, lp::Status::Optimal);
  EXPECT_NEAR(*s.objective, 4.20, 1e-9);
  for (std::size_t t = 0; t < 4; ++t) EXPECT_NEAR(s.assignment.at({"x", t}), 0.0, 1e-9);
  EXPECT_NEAR(*oracle(p).objective, 4.20, 1e-12);
}

TEST(EvCharging, ZeroEnergyGivesEmptySchedule) {
  const auto p = ref_with(ProblemKind::EvCharging, {{"energy_kwh", 0.0}});
  const auto s = ir::solve(build(p));
  EXPECT_NEAR(*s.objective, 0.0, 1e-12);
  for (const auto& [ref, v] : s.assignment) EXPECT_NEAR(v, 0.0, 1e-12) << ref.str();
}

TEST(EvCharging, EnergyAboveChargerCapacityIsInfeasibleSpec) {
  const auto p = ref_with(ProblemKind::EvCharging, {{"energy_kwh", 181.0}});
  try {
    (void)build(p);
    FAIL();
  } catch (const ParamError& e) {
    EXPECT_EQ(e.code(), "InfeasibleSpec");
    EXPECT_NE(std::string(e.what()).find("181"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("180"), std::string::npos);
  }
  EXPECT_NO_THROW((void)build(ref_with(ProblemKind::EvCharging, {{"energy_kwh", 180.0}})));
}

TEST(EvCharging, PriceLengthMustMatchHorizon) {
  const auto p = ElicitedParams::unchecked(
      ProblemKind::EvCharging, [] {
        auto v = reference_params(ProblemKind::EvCharging).values();
        v["prices"] = std::vector<double>(11, 0.1);
        return v;
      }());
  EXPECT_EQ(builder_error(p), "DimensionMismatch");
}

TEST(Hvac, HotDayClampsToUpperSetpoint) {
  const auto p = reference_params(ProblemKind::HvacSetpoint);
  const auto s = ir::solve(build(p));
  EXPECT_NEAR(*s.objective, 9.60, 1e-9);
  EXPECT_NEAR(s.assignment.at({"temp", {}}), 75.0, 1e-9);
  EXPECT_NEAR(oracle(p).assignment.at({"temp", {}}), 75.0, 0.0);
  EXPECT_EQ(build(p).metadata.at("oracle_temp"), "75");
}

TEST(Hvac, AmbientInsideBandCostsNothing) {
  const auto p = ref_with(ProblemKind::HvacSetpoint, {{"ambient_temp", 70.0}});
  const auto s = ir::solve(build(p));
  EXPECT_NEAR(*s.objective, 0.0, 1e-12);
  EXPECT_NEAR(s.assignment.at({"temp", {}}), 70.0, 1e-9);
}

TEST(Hvac, InvertedBandIsBadBounds) {
  auto v = reference_params(ProblemKind::HvacSetpoint).values();
  v["comfort_band"] = Interval{75, 65};
  EXPECT_EQ(builder_error(ElicitedParams::unchecked(ProblemKind::HvacSetpoint, v)), "BadBounds");
}

TEST(BatteryDispatch, FixtureMatchesOracle) {
  const auto p = reference_params(ProblemKind::BatteryDispatch);
  const double lp_value = solved(p);
  EXPECT_NEAR(lp_value, *oracle(p).objective, 1e-6);
  EXPECT_NEAR(lp_value, 2.894, 1e-9);
  EXPECT_NEAR(report_value(p, "cost_without_battery"), 4.094, 1e-9);
  EXPECT_NEAR(report_value(p, "battery_savings"), 1.2, 1e-9);
}

TEST(BatteryDispatch, EnergyIsConserved) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = ir::solve(build(random_params(ProblemKind::BatteryDispatch, seed)));
    double total = 0.0;
    for (std::size_t t = 0; t < 24; ++t) total += s.assignment.at({"x", t});
    EXPECT_NEAR(total, 0.0, 1e-7) << "seed " << seed;
    EXPECT_NEAR(s.assignment.at({"b", 0}), 0.0, 1e-9);
    EXPECT_NEAR(s.assignment.at({"b", 24}), 0.0, 1e-7);
  }
}

TEST(BatteryDispatch, FlatPricesAndNoLoadGiveZero) {
  const auto p = ref_with(ProblemKind::BatteryDispatch, {{"prices", std::vector<double>(24, 0.1)},
                                                          {"solar", std::vector<double>(24, 0.0)},
                                                          {"demand", std::vector<double>(24, 0.0)}});
  const auto s = ir::solve(build(p));
  EXPECT_NEAR(*s.objective, 0.0, 1e-12);
  for (std::size_t t = 0; t < 24; ++t) EXPECT_NEAR(s.assignment.at({"x", t}), 0.0, 1e-12);
}

TEST(BatteryDispatch, ZeroPowerLeavesOnlyNetLoad) {
  const auto p = ref_with(ProblemKind::BatteryDispatch, {{"max_power_kw", 0.0}});
  double expect = 0.0;
  for (std::size_t t = 0; t < 24; ++t)
    expect += p.vec("prices")[t] * (p.vec("demand")[t] - p.vec("solar")[t]);
  EXPECT_NEAR(solved(p), expect, 1e-9);
}

TEST(BatteryDispatch, ShortProfileIsDimensionMismatch) {
  auto v = reference_params(ProblemKind::BatteryDispatch).values();
  v["solar"] = std::vector<double>(23, 0.0);
  EXPECT_EQ(builder_error(ElicitedParams::unchecked(ProblemKind::BatteryDispatch, v)), "DimensionMismatch");
}

TEST(BatteryDispatch, NoExportForbidsSellingBack) {
  const auto base = reference_params(ProblemKind::BatteryDispatch);
  const auto strict = base.with("no_export", std::string("yes"));
  const auto s = ir::solve(build(strict));
  ASSERT_EQ(s.status, lp::Status::Optimal);
  for (std::size_t t = 0; t < 24; ++t)
    EXPECT_GE(s.assignment.at({"x", t}) - base.vec("solar")[t] + base.vec("demand")[t], -1e-7);
  EXPECT_GE(*s.objective, solved(base) - 1e-9);
}

TEST(PvSizing, ReferenceFigures) {
  const auto p = reference_params(ProblemKind::PvSizing);
  const auto s = ir::solve(build(p));
  EXPECT_NEAR(*s.objective, 5000.0, 1e-6);
  EXPECT_NEAR(s.assignment.at({"area", {}}), 300.0, 1e-6);
  EXPECT_NEAR(report_value(p, "total_cost"), 3000.0, 1e-6);
  EXPECT_NEAR(report_value(p, "monthly_production"), 540.0, 1e-6);
  EXPECT_NEAR(report_value(p, "annual_savings"), 405.6, 1e-6);
}

TEST(PvSizing, ExactConsumptionBindsProduction) {
  const auto p = ref_with(ProblemKind::PvSizing, {{"monthly_consumption_kwh", 540.0}});
  const auto s = ir::solve(build(p));
  EXPECT_NEAR(s.assignment.at({"area", {}}), 300.0, 1e-6);
  const auto inst = build(p);
  for (const auto& c : inst.constraints)
    if (c.label == "production") EXPECT_NEAR(c.lhs.evaluate(s.assignment), c.rhs, 1e-6);
}

TEST(PvSizing, ZeroConsumptionStillFillsRoof) {
  const auto p = ref_with(ProblemKind::PvSizing, {{"monthly_consumption_kwh", 0.0}});
  EXPECT_NEAR(ir::solve(build(p)).assignment.at({"area", {}}), 300.0, 1e-6);
}

TEST(PvSizing, InfeasibleSpecs) {
  EXPECT_EQ(builder_error(ref_with(ProblemKind::PvSizing, {{"monthly_consumption_kwh", 541.0}})), "InfeasibleSpec");
  EXPECT_EQ(builder_error(ref_with(ProblemKind::PvSizing, {{"budget", 2000.0}})), "InfeasibleSpec");
}

TEST(HeatPump, SavingsClosedForm) {
  const auto p = reference_params(ProblemKind::HeatPump);
  EXPECT_NEAR(solved(p), -550.0, 1e-9);
  EXPECT_NEAR(report_value(p, "annual_savings"), 550.0, 1e-9);
}

TEST(HeatPump, EqualConsumptionCostsMaintenance) {
  const auto p = ref_with(ProblemKind::HeatPump, {{"heat_pump_annual_kwh", 3000.0}});
  EXPECT_NEAR(report_value(p, "annual_savings"), -200.0, 1e-9);
  const auto q = ref_with(ProblemKind::HeatPump, {{"heat_pump_annual_kwh", 3000.0}, {"maintenance_per_year", 0.0}});
  EXPECT_NEAR(report_value(q, "annual_savings"), 0.0, 1e-9);
}

TEST(HeatPump, NegativeConsumptionIsRejected) {
  auto v = reference_params(ProblemKind::HeatPump).values();
  v["ac_annual_kwh"] = -1.0;
  EXPECT_EQ(builder_error(ElicitedParams::unchecked(ProblemKind::HeatPump, v)), "NegativeInput");
}

TEST(BatterySizing, ReferenceSize) {
  const auto p = reference_params(ProblemKind::BatterySizing);
  const auto s = ir::solve(build(p));
  EXPECT_NEAR(s.assignment.at({"size", {}}), 8.66875, 1e-9);
  EXPECT_NEAR(*s.objective, 2898.527734375, 1e-6);
  EXPECT_NEAR(battery_sizing_closed_form(10, 0.25, 2, 30, 10, 0.95), 8.66875, 1e-12);
}

TEST(BatterySizing, UnitEfficiency) {
  // With eta = 1 the interior optimum is K/(2 P_bat) = 182.5 / 20.
  const auto p = ref_with(ProblemKind::BatterySizing, {{"efficiency", 1.0}});
  EXPECT_NEAR(ir::solve(build(p)).assignment.at({"size", {}}), 9.125, 1e-9);
}

TEST(BatterySizing, NoDeficitNoBattery) {
  const auto p = ref_with(ProblemKind::BatterySizing, {{"solar_kwh_per_day", 35.0}});
  EXPECT_NEAR(ir::solve(build(p)).assignment.at({"size", {}}), 0.0, 1e-9);
  EXPECT_NEAR(report_value(p, "grid_purchase"), 0.0, 1e-9);
}

TEST(BatterySizing, PricedOutBattery) {
  const auto p = ref_with(ProblemKind::BatterySizing, {{"battery_unit_cost", 1e9}});
  EXPECT_NEAR(ir::solve(build(p)).assignment.at({"size", {}}), 0.0, 1e-6);
  EXPECT_NEAR(report_value(p, "grid_purchase"), 20.0, 1e-5);
}

// ---- builder / oracle agreement -------------------------------------------------

TEST(Oracle, AgreesWithSolverOnRandomParameters) {
  for (auto kind : kAllKinds) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto p = random_params(kind, seed);
      const auto s = ir::solve(build(p));
      const auto o = oracle(p);
      ASSERT_EQ(s.status, lp::Status::Optimal) << to_string(kind) << " seed " << seed;
      EXPECT_NEAR(*s.objective, *o.objective, 1e-5 * std::max(1.0, std::abs(*o.objective)))
          << to_string(kind) << " seed " << seed;
      // The oracle plan is feasible for the builder's instance and attains its value.
      const auto inst = build(p);
      EXPECT_LE(inst.max_violation(o.assignment), 1e-6) << to_string(kind) << " seed " << seed;
      EXPECT_NEAR(inst.objective_value(o.assignment), *o.objective, 1e-6 * std::max(1.0, std::abs(*o.objective)));
    }
  }
}

TEST(Oracle, RandomParamsAreDeterministicAndValid) {
  for (auto kind : kAllKinds) {
    EXPECT_EQ(random_params(kind, 5).values(), random_params(kind, 5).values());
    EXPECT_NE(random_params(kind, 5).values(), random_params(kind, 6).values());
    EXPECT_NO_THROW((void)ElicitedParams::make(kind, random_params(kind, 11).values()));
  }
}

TEST(Builders, Deterministic) {
  for (auto kind : kAllKinds) {
    const auto p = reference_params(kind);
    EXPECT_EQ(ir::to_json(build(p)).dump(), ir::to_json(build(p)).dump());
    EXPECT_TRUE(ir::validate(build(p)).empty()) << to_string(kind);
  }
}

// ---- monotonicity ------------------------------------------------------------------

TEST(Monotonicity, EvCostNondecreasingInEachPrice) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> bump(0.0, 0.2);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto p = random_params(ProblemKind::EvCharging, seed);
    const double base = solved(p);
    for (std::size_t t = 0; t < p.vec("prices").size(); ++t) {
      auto prices = p.vec("prices");
      prices[t] += bump(rng);
      EXPECT_GE(solved(p.with("prices", prices)), base - 1e-9) << "seed " << seed << " slot " << t;
    }
  }
}

TEST(Monotonicity, PvSavingsGrowWithRate) {
  double prev = -1e300;
  for (double rate = 0.05; rate <= 0.5; rate += 0.05) {
    const double s = report_value(ref_with(ProblemKind::PvSizing, {{"electricity_rate", rate}}), "annual_savings");
    EXPECT_GE(s, prev - 1e-9);
    prev = s;
  }
}

TEST(Monotonicity, BatterySizeShrinksWithUnitCost) {
  double prev = 1e300;
  for (double c = 1.0; c <= 200.0; c *= 1.5) {
    const auto p = ref_with(ProblemKind::BatterySizing, {{"battery_unit_cost", c}});
    const double b = ir::solve(build(p)).assignment.at({"size", {}});
    EXPECT_LE(b, prev + 1e-9);
    prev = b;
  }
}
