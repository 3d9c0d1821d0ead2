#include "ec/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace ec::problems {

using ir::ConvexTerm;
using ir::Constraint;
using ir::LinExpr;
using ir::OptInstance;
using ir::Relation;
using ir::TermKind;
using ir::Variable;
using ir::VarRef;

namespace {

std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void require_nonnegative(const ElicitedParams& p, std::initializer_list<const char*> names) {
  std::vector<std::string> bad;
  for (const char* n : names)
    if (!(p.real(n) >= 0.0)) bad.emplace_back(n);
  if (bad.empty()) return;
  std::string list;
  for (const auto& b : bad) list += (list.empty() ? "" : ", ") + b;
  throw ParamError("NegativeInput", "parameters must be non-negative: " + list, bad);
}

void require_nonnegative(const std::vector<double>& v, const char* name) {
  for (double x : v)
    if (!(x >= 0.0))
      throw ParamError("NegativeInput", std::string(name) + " must not contain negative values",
                       {name});
}

OptInstance base_instance(ProblemKind kind) {
  OptInstance inst;
  inst.metadata["kind"] = to_string(kind);
  return inst;
}

LinExpr x_at(const std::string& name, std::size_t i, double coef = 1.0) {
  return LinExpr::var(VarRef{name, i}, coef);
}

double value_of(const lp::Solution& s, const std::string& name) {
  auto it = s.assignment.find(VarRef{name, std::nullopt});
  return it == s.assignment.end() ? 0.0 : it->second;
}

std::vector<double> vector_of(const lp::Solution& s, const std::string& name) {
  std::vector<double> out;
  for (const auto& [ref, v] : s.assignment)
    if (ref.name == name && ref.index) {
      if (out.size() <= *ref.index) out.resize(*ref.index + 1, 0.0);
      out[*ref.index] = v;
    }
  return out;
}

}  // namespace

ir::OptInstance build_ev_charging(const ElicitedParams& p) {
  require_nonnegative(p, {"charger_max_kw", "energy_kwh"});
  const auto& prices = p.vec("prices");
  require_nonnegative(prices, "prices");
  const std::int64_t horizon = p.integer("horizon_hours");
  if (horizon < 1) throw ParamError("BadBounds", "horizon_hours must be at least 1", {"horizon_hours"});
  const auto T = static_cast<std::size_t>(horizon);
  if (prices.size() != T)
    throw ParamError("DimensionMismatch",
                     "prices has " + std::to_string(prices.size()) + " entries but horizon_hours is " +
                         std::to_string(T),
                     {"prices", "horizon_hours"});
  const double P = p.real("charger_max_kw"), E = p.real("energy_kwh");
  if (E > static_cast<double>(T) * P * (1.0 + 1e-12))
    throw ParamError("InfeasibleSpec",
                     "required energy " + num(E) + " kWh exceeds charger_max_kw x horizon_hours = " +
                         num(P) + " x " + std::to_string(T) + " = " +
                         num(P * static_cast<double>(T)) + " kWh",
                     {"energy_kwh", "charger_max_kw", "horizon_hours"});

  OptInstance inst = base_instance(ProblemKind::EvCharging);
  inst.variables.push_back(Variable::vector("x", T, 0.0, P));
  LinExpr cost, total;
  for (std::size_t t = 0; t < T; ++t) {
    cost += x_at("x", t, prices[t]);
    total += x_at("x", t);
  }
  inst.objective.push_back({TermKind::Linear, cost, 1.0});
  inst.constraints.push_back({total, Relation::Eq, E, "energy"});
  return inst;
}

ir::OptInstance build_hvac(const ElicitedParams& p) {
  const Interval band = p.interval("comfort_band");
  if (band.lo > band.hi)
    throw ParamError("BadBounds", "comfort band lower end " + num(band.lo) + " exceeds upper end " + num(band.hi),
                     {"comfort_band"});
  require_nonnegative(p, {"occupancy_hours", "electricity_cost"});
  const double e = p.real("efficiency");
  if (!(e > 0.0)) throw ParamError("NegativeInput", "efficiency must be positive", {"efficiency"});
  const double y = p.real("ambient_temp");
  const double weight = p.real("electricity_cost") * p.real("occupancy_hours") / e;

  OptInstance inst = base_instance(ProblemKind::HvacSetpoint);
  inst.variables.push_back(Variable::scalar("temp", band.lo, band.hi));
  inst.objective.push_back(
      {TermKind::Abs, LinExpr::var(VarRef{"temp", std::nullopt}) - LinExpr(y), weight});
  inst.metadata["oracle_temp"] = num(std::clamp(y, band.lo, band.hi));
  return inst;
}

ir::OptInstance build_battery_dispatch(const ElicitedParams& p) {
  constexpr std::size_t T = 24;
  const auto& price = p.vec("prices");
  const auto& solar = p.vec("solar");
  const auto& demand = p.vec("demand");
  for (const auto& [name, v] : {std::pair{"prices", &price}, {"solar", &solar}, {"demand", &demand}}) {
    if (v->size() != T)
      throw ParamError("DimensionMismatch",
                       std::string(name) + " must have 24 hourly values, got " + std::to_string(v->size()),
                       {name});
    require_nonnegative(*v, name);
  }
  require_nonnegative(p, {"max_power_kw", "capacity_kwh"});
  const double P = p.real("max_power_kw"), B = p.real("capacity_kwh");
  const bool no_export = p.has("no_export") && p.text("no_export") == "yes";

  OptInstance inst = base_instance(ProblemKind::BatteryDispatch);
  inst.variables.push_back(Variable::vector("x", T, -P, P));
  inst.variables.push_back(Variable::vector("b", T + 1, 0.0, B));
  LinExpr cost;
  for (std::size_t t = 0; t < T; ++t)
    cost += price[t] * (x_at("x", t) - LinExpr(solar[t]) + LinExpr(demand[t]));
  inst.objective.push_back({TermKind::Linear, cost, 1.0});
  inst.constraints.push_back({x_at("b", 0), Relation::Eq, 0.0, "initial_soc"});
  for (std::size_t t = 0; t < T; ++t)
    inst.constraints.push_back({x_at("b", t + 1) - x_at("b", t) - x_at("x", t), Relation::Eq, 0.0,
                                "soc_" + std::to_string(t)});
  inst.constraints.push_back({x_at("b", T), Relation::Eq, 0.0, "terminal_soc"});
  if (no_export)
    for (std::size_t t = 0; t < T; ++t)
      inst.constraints.push_back({x_at("x", t), Relation::Ge, solar[t] - demand[t],
                                  "no_export_" + std::to_string(t)});
  return inst;
}

static void check_pv_feasible(const ElicitedParams& p) {
  require_nonnegative(p, {"roof_area_sqft", "monthly_consumption_kwh", "budget",
                          "panel_price_per_sqft", "wattage_per_sqft", "capacity_factor"});
  const double R = p.real("roof_area_sqft"), M = p.real("monthly_consumption_kwh");
  const double yield = p.real("wattage_per_sqft") * p.real("capacity_factor");
  if (!(yield > 0.0))
    throw ParamError("BadBounds", "wattage_per_sqft x capacity_factor must be positive",
                     {"wattage_per_sqft", "capacity_factor"});
  if (R * yield < M - 1e-12 * M)
    throw ParamError("InfeasibleSpec",
                     "the roof can produce at most " + num(R * yield) + " kWh per month, below the " +
                         num(M) + " kWh consumption",
                     {"roof_area_sqft", "monthly_consumption_kwh"});
  const double min_cost = p.real("panel_price_per_sqft") * (M / yield);
  if (min_cost > p.real("budget") * (1.0 + 1e-12))
    throw ParamError("InfeasibleSpec",
                     "covering consumption needs at least " + num(min_cost) +
                         " USD of panels, above the budget of " + num(p.real("budget")) + " USD",
                     {"budget", "monthly_consumption_kwh"});
}

ir::OptInstance build_pv_sizing(const ElicitedParams& p) {
  check_pv_feasible(p);
  const VarRef a{"area", std::nullopt};
  OptInstance inst = base_instance(ProblemKind::PvSizing);
  inst.variables.push_back(Variable::scalar("area", 0.0));
  inst.objective.push_back(
      {TermKind::Linear, LinExpr(p.real("budget")) - LinExpr::var(a, p.real("panel_price_per_sqft")), 1.0});
  inst.constraints.push_back({LinExpr::var(a), Relation::Le, p.real("roof_area_sqft"), "roof"});
  inst.constraints.push_back({LinExpr::var(a, p.real("wattage_per_sqft") * p.real("capacity_factor")),
                              Relation::Ge, p.real("monthly_consumption_kwh"), "production"});
  return inst;
}

ir::OptInstance build_heat_pump(const ElicitedParams& p) {
  require_nonnegative(p, {"electricity_rate", "ac_annual_kwh", "heat_pump_annual_kwh", "maintenance_per_year"});
  const double r = p.real("electricity_rate");
  const VarRef a{"a", std::nullopt}, b{"b", std::nullopt};
  OptInstance inst = base_instance(ProblemKind::HeatPump);
  inst.variables.push_back(Variable::scalar("a", 0.0));
  inst.variables.push_back(Variable::scalar("b", 0.0));
  inst.objective.push_back({TermKind::Linear, LinExpr::var(a) - LinExpr::var(b), 1.0});
  inst.constraints.push_back({LinExpr::var(a), Relation::Eq,
                              p.real("heat_pump_annual_kwh") * r + p.real("maintenance_per_year"),
                              "heat_pump_cost"});
  inst.constraints.push_back({LinExpr::var(b), Relation::Eq, p.real("ac_annual_kwh") * r, "ac_cost"});
  return inst;
}

ir::OptInstance build_battery_sizing(const ElicitedParams& p) {
  require_nonnegative(p, {"battery_unit_cost", "electricity_rate", "years", "solar_kwh_per_day",
                          "evening_demand_kwh", "efficiency"});
  const double eta = p.real("efficiency");
  if (!(eta > 0.0 && eta <= 1.0))
    throw ParamError("BadBounds", "efficiency must lie in (0, 1]", {"efficiency"});
  const double K = p.real("electricity_rate") * 365.0 * p.real("years");
  const VarRef B{"size", std::nullopt};
  OptInstance inst = base_instance(ProblemKind::BatterySizing);
  inst.variables.push_back(Variable::scalar("size", 0.0));
  inst.objective.push_back({TermKind::Square, LinExpr::var(B), p.real("battery_unit_cost")});
  inst.objective.push_back(
      {TermKind::Hinge0,
       LinExpr(p.real("evening_demand_kwh") - p.real("solar_kwh_per_day")) - LinExpr::var(B, eta), K});
  return inst;
}

ir::OptInstance build(const ElicitedParams& p) {
  switch (p.kind()) {
    case ProblemKind::EvCharging: return build_ev_charging(p);
    case ProblemKind::HvacSetpoint: return build_hvac(p);
    case ProblemKind::BatteryDispatch: return build_battery_dispatch(p);
    case ProblemKind::PvSizing: return build_pv_sizing(p);
    case ProblemKind::HeatPump: return build_heat_pump(p);
    case ProblemKind::BatterySizing: return build_battery_sizing(p);
  }
  throw Error("UnknownKind", "unknown problem kind");
}

std::vector<ReportItem> report(const ElicitedParams& p, const lp::Solution& s) {
  std::vector<ReportItem> out;
  if (s.status != lp::Status::Optimal || !s.objective) return out;
  const double obj = *s.objective;
  switch (p.kind()) {
    case ProblemKind::EvCharging: {
      const auto x = vector_of(s, "x");
      const double e = std::accumulate(x.begin(), x.end(), 0.0);
      out.push_back({"total_cost", "Total charging cost", obj, "USD"});
      out.push_back({"energy_delivered", "Energy delivered", e, "kWh"});
      if (e > 0.0) out.push_back({"average_price", "Average price paid", obj / e, "USD/kWh"});
      break;
    }
    case ProblemKind::HvacSetpoint:
      out.push_back({"setpoint", "Optimal adjusted temperature", value_of(s, "temp"), "degF"});
      out.push_back({"daily_cost", "Minimum energy cost per day", obj, "USD"});
      break;
    case ProblemKind::BatteryDispatch: {
      const auto& price = p.vec("prices");
      double baseline = 0.0;
      for (std::size_t t = 0; t < price.size(); ++t)
        baseline += price[t] * (p.vec("demand")[t] - p.vec("solar")[t]);
      const auto x = vector_of(s, "x");
      out.push_back({"total_cost", "Total electricity cost", obj, "USD"});
      out.push_back({"cost_without_battery", "Cost without the battery", baseline, "USD"});
      out.push_back({"battery_savings", "Savings from the battery", baseline - obj, "USD"});
      out.push_back({"net_battery_energy", "Net battery energy", std::accumulate(x.begin(), x.end(), 0.0), "kWh"});
      break;
    }
    case ProblemKind::PvSizing: {
      const double A = value_of(s, "area");
      const double M = p.real("monthly_consumption_kwh"), rate = p.real("electricity_rate");
      const double production = A * p.real("wattage_per_sqft") * p.real("capacity_factor");
      out.push_back({"panel_area", "Optimal panel area", A, "sqft"});
      out.push_back({"total_cost", "Total cost", p.real("panel_price_per_sqft") * A, "USD"});
      out.push_back({"monthly_production", "Monthly energy production", production, "kWh"});
      out.push_back({"annual_savings", "Annual savings",
                     12.0 * M * rate - 12.0 * (production - M) * rate, "USD"});
      out.push_back({"unused_budget", "Unused budget", obj, "USD"});
      break;
    }
    case ProblemKind::HeatPump: {
      const double a = value_of(s, "a"), b = value_of(s, "b");
      out.push_back({"heat_pump_cost", "Annual heat pump cost", a, "USD"});
      out.push_back({"ac_cost", "Annual AC cost", b, "USD"});
      out.push_back({"annual_savings", "Annual savings with heat pump", b - a, "USD"});
      break;
    }
    case ProblemKind::BatterySizing: {
      const double B = value_of(s, "size");
      const double G = std::max(0.0, p.real("evening_demand_kwh") - p.real("solar_kwh_per_day") -
                                         p.real("efficiency") * B);
      out.push_back({"battery_size", "Optimal battery size", B, "kWh"});
      out.push_back({"grid_purchase", "Daily grid purchase", G, "kWh"});
      out.push_back({"total_cost", "Total cost over the period", obj, "USD"});
      break;
    }
  }
  return out;
}

std::map<std::string, std::string> variable_units(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::EvCharging: return {{"x", "kWh"}};
    case ProblemKind::HvacSetpoint: return {{"temp", "degF"}};
    case ProblemKind::BatteryDispatch: return {{"x", "kWh"}, {"b", "kWh"}};
    case ProblemKind::PvSizing: return {{"area", "sqft"}};
    case ProblemKind::HeatPump: return {{"a", "USD"}, {"b", "USD"}};
    case ProblemKind::BatterySizing: return {{"size", "kWh"}};
  }
  return {};
}

std::map<std::string, std::string> variable_descriptions(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::EvCharging: return {{"x", "energy charged in each slot"}};
    case ProblemKind::HvacSetpoint: return {{"temp", "indoor setpoint"}};
    case ProblemKind::BatteryDispatch:
      return {{"x", "battery charge (+) or discharge (-) per hour"}, {"b", "battery state of charge"}};
    case ProblemKind::PvSizing: return {{"area", "installed panel area"}};
    case ProblemKind::HeatPump: return {{"a", "annual heat pump cost"}, {"b", "annual AC cost"}};
    case ProblemKind::BatterySizing: return {{"size", "battery capacity"}};
  }
  return {};
}

namespace {

// Uniform double in [lo, hi) from the top 53 bits, rounded to `digits`
// decimals so generated documents stay readable.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}
  double operator()(double lo, double hi, int digits = 3) {
    const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    const double scale = std::pow(10.0, digits);
    return std::round((lo + (hi - lo) * u) * scale) / scale;
  }
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(rng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  std::vector<double> vec(std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (auto& x : v) x = (*this)(lo, hi);
    return v;
  }

 private:
  std::mt19937_64 rng_;
};

const std::vector<double> kDispatchPrices = [] {
  std::vector<double> v(24, 0.1);
  for (std::size_t t = 18; t < 22; ++t) v[t] = 0.2;
  return v;
}();
const std::vector<double> kDispatchSolar = {0,    0,    0,    0,    0,    0,    0,    0.05,
                                            0.15, 0.25, 0.35, 0.42, 0.48, 0.5,  0.46, 0.38,
                                            0.27, 0.15, 0.05, 0,    0,    0,    0,    0};
const std::vector<double> kDispatchDemand = {0.8, 0.7, 0.6, 0.6, 0.7, 0.9, 1.3, 1.8,
                                             1.6, 1.2, 1.0, 1.0, 1.1, 1.0, 1.0, 1.2,
                                             1.6, 2.2, 2.8, 2.9, 2.7, 2.3, 1.7, 1.1};

}  // namespace

ElicitedParams reference_params(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::EvCharging: {
      std::vector<double> prices(12, 0.06);
      std::fill(prices.begin(), prices.begin() + 4, 0.14);
      return ElicitedParams::make(kind, {{"charger_max_kw", 15.0},
                                         {"energy_kwh", 70.0},
                                         {"location", std::string("home")},
                                         {"horizon_hours", std::int64_t{12}},
                                         {"prices", prices}});
    }
    case ProblemKind::HvacSetpoint:
      return ElicitedParams::make(kind, {{"comfort_band", Interval{65.0, 75.0}},
                                         {"occupancy_hours", 12.0},
                                         {"efficiency", 2.5},
                                         {"ambient_temp", 85.0},
                                         {"electricity_cost", 0.2}});
    case ProblemKind::BatteryDispatch:
      return ElicitedParams::make(kind, {{"prices", kDispatchPrices},
                                         {"max_power_kw", 3.0},
                                         {"capacity_kwh", 20.0},
                                         {"solar", kDispatchSolar},
                                         {"demand", kDispatchDemand}});
    case ProblemKind::PvSizing:
      return ElicitedParams::make(kind, {{"location", std::string("Phoenix, AZ")},
                                         {"roof_area_sqft", 300.0},
                                         {"monthly_consumption_kwh", 400.0},
                                         {"electricity_rate", 0.13},
                                         {"budget", 8000.0}});
    case ProblemKind::HeatPump:
      return ElicitedParams::make(kind, {{"climate", std::string("hot and humid")},
                                         {"electricity_rate", 0.75},
                                         {"ac_annual_kwh", 3000.0},
                                         {"heat_pump_annual_kwh", 2000.0},
                                         {"maintenance_per_year", 200.0}});
    case ProblemKind::BatterySizing:
      return ElicitedParams::make(kind, {{"battery_unit_cost", 10.0},
                                         {"efficiency", 0.95},
                                         {"solar_kwh_per_day", 10.0},
                                         {"electricity_rate", 0.25},
                                         {"years", 2.0}});
  }
  throw Error("UnknownKind", "unknown problem kind");
}

ElicitedParams random_params(ProblemKind kind, std::uint64_t seed) {
  Draw d(seed ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(kind) + 1)));
  switch (kind) {
    case ProblemKind::EvCharging: {
      const std::int64_t T = d.integer(6, 24);
      const double P = d(3.0, 22.0, 1);
      const double E = d(0.0, 0.9 * P * static_cast<double>(T), 1);
      static const char* kLocations[] = {"home", "work", "public"};
      return ElicitedParams::make(kind, {{"charger_max_kw", P},
                                         {"energy_kwh", E},
                                         {"location", std::string(kLocations[d.integer(0, 2)])},
                                         {"horizon_hours", T},
                                         {"prices", d.vec(static_cast<std::size_t>(T), 0.03, 0.4)}});
    }
    case ProblemKind::HvacSetpoint: {
      const double lo = d(60.0, 72.0, 1);
      return ElicitedParams::make(kind, {{"comfort_band", Interval{lo, lo + d(0.0, 10.0, 1)}},
                                         {"occupancy_hours", d(0.0, 24.0, 1)},
                                         {"efficiency", d(0.5, 4.0, 2)},
                                         {"ambient_temp", d(20.0, 110.0, 1)},
                                         {"electricity_cost", d(0.05, 0.5)}});
    }
    case ProblemKind::BatteryDispatch: {
      std::map<std::string, ParamValue> v{{"prices", d.vec(24, 0.05, 0.4)},
                                          {"max_power_kw", d(0.0, 10.0, 1)},
                                          {"capacity_kwh", d(1.0, 20.0, 1)},
                                          {"solar", d.vec(24, 0.0, 3.0)},
                                          {"demand", d.vec(24, 0.0, 5.0)}};
      // Export limits are only feasible when each hour's surplus fits the charger.
      bool surplus_fits = true;
      const auto& s = std::get<std::vector<double>>(v["solar"]);
      const auto& dm = std::get<std::vector<double>>(v["demand"]);
      for (std::size_t t = 0; t < 24; ++t)
        if (s[t] > dm[t]) surplus_fits = false;
      if (d.integer(0, 3) == 0 && surplus_fits) v["no_export"] = std::string("yes");
      return ElicitedParams::make(kind, std::move(v));
    }
    case ProblemKind::PvSizing: {
      const double R = d(100.0, 1000.0, 0);
      const double w = 15.0, cf = 0.12, pr = 10.0;
      const double M = d(0.0, 0.95 * R * w * cf, 1);
      const double need = pr * M / (w * cf);
      const double budget = std::max(std::ceil(need * 1.01), d(0.5 * pr * R, 1.5 * pr * R, 0));
      return ElicitedParams::make(kind, {{"location", std::string("somewhere")},
                                         {"roof_area_sqft", R},
                                         {"monthly_consumption_kwh", M},
                                         {"electricity_rate", d(0.05, 0.4)},
                                         {"budget", budget}});
    }
    case ProblemKind::HeatPump:
      return ElicitedParams::make(kind, {{"climate", std::string("mixed")},
                                         {"electricity_rate", d(0.05, 0.8)},
                                         {"ac_annual_kwh", d(500.0, 5000.0, 0)},
                                         {"heat_pump_annual_kwh", d(200.0, 5000.0, 0)},
                                         {"maintenance_per_year", d(0.0, 400.0, 0)}});
    case ProblemKind::BatterySizing:
      return ElicitedParams::make(kind, {{"battery_unit_cost", d(1.0, 50.0, 2)},
                                         {"efficiency", d(0.7, 1.0)},
                                         {"solar_kwh_per_day", d(0.0, 40.0, 1)},
                                         {"electricity_rate", d(0.05, 0.4)},
                                         {"years", d(1.0, 15.0, 0)}});
  }
  throw Error("UnknownKind", "unknown problem kind");
}

}  // namespace ec::problems
