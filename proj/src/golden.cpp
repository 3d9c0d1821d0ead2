// Canonical ecdsl documents for each problem kind. The scripted adapter uses
// these as "correct model output", and tests compile them against builders.

#include <sstream>

#include "ec/dsl.hpp"
#include "ec/problems.hpp"

namespace ec::problems {

namespace {

using dsl::format_number;

std::string list(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_number(v[i]);
  }
  return out + "]";
}

std::string num(double v) { return format_number(v); }

}  // namespace

std::string golden_document(const ElicitedParams& p) {
  std::ostringstream os;
  os << "problem \"" << to_string(p.kind()) << "\"\n";
  switch (p.kind()) {
    case ProblemKind::EvCharging: {
      const auto& prices = p.vec("prices");
      os << "# energy charged per slot, capped by the charger\n"
         << "var x[" << prices.size() << "] >= 0 <= " << num(p.real("charger_max_kw")) << "\n"
         << "param price[" << prices.size() << "] = " << list(prices) << "\n"
         << "minimize sum(t, price[t] * x[t])\n"
         << "subject energy: sum(t, x[t]) == " << num(p.real("energy_kwh")) << "\n";
      break;
    }
    case ProblemKind::HvacSetpoint: {
      const Interval band = p.interval("comfort_band");
      os << "var temp >= " << num(band.lo) << " <= " << num(band.hi) << "\n"
         << "param cost = " << num(p.real("electricity_cost")) << "\n"
         << "param ambient = " << num(p.real("ambient_temp")) << "\n"
         << "param cop = " << num(p.real("efficiency")) << "\n"
         << "param hours = " << num(p.real("occupancy_hours")) << "\n"
         << "# energy to hold the setpoint grows with the gap to outdoor air\n"
         << "minimize cost * hours / cop * abs(temp - ambient)\n";
      break;
    }
    case ProblemKind::BatteryDispatch: {
      const auto& s = p.vec("solar");
      const auto& d = p.vec("demand");
      const double P = p.real("max_power_kw");
      os << "# x: charge (+) / discharge (-) per hour, b: state of charge\n"
         << "var x[24] >= " << num(-P) << " <= " << num(P) << "\n"
         << "var b[25] >= 0 <= " << num(p.real("capacity_kwh")) << "\n"
         << "param price[24] = " << list(p.vec("prices")) << "\n"
         << "param solar[24] = " << list(s) << "\n"
         << "param demand[24] = " << list(d) << "\n"
         << "minimize sum(t, price[t] * (x[t] - solar[t] + demand[t]))\n"
         << "subject initial_soc: b[0] == 0\n";
      for (std::size_t t = 0; t < 24; ++t)
        os << "subject soc_" << t << ": b[" << t + 1 << "] - b[" << t << "] - x[" << t << "] == 0\n";
      os << "subject terminal_soc: b[24] == 0\n";
      if (p.has("no_export") && p.text("no_export") == "yes")
        for (std::size_t t = 0; t < 24; ++t)
          os << "subject no_export_" << t << ": x[" << t << "] - solar[" << t << "] + demand[" << t
             << "] >= 0\n";
      break;
    }
    case ProblemKind::PvSizing:
      os << "var area >= 0\n"
         << "param budget = " << num(p.real("budget")) << "\n"
         << "param panel_price = " << num(p.real("panel_price_per_sqft")) << "\n"
         << "param roof = " << num(p.real("roof_area_sqft")) << "\n"
         << "param wattage = " << num(p.real("wattage_per_sqft")) << "\n"
         << "param capacity_factor = " << num(p.real("capacity_factor")) << "\n"
         << "param consumption = " << num(p.real("monthly_consumption_kwh")) << "\n"
         << "# unused budget\n"
         << "minimize budget - panel_price * area\n"
         << "subject roof: area <= roof\n"
         << "subject production: area * wattage * capacity_factor >= consumption\n";
      break;
    case ProblemKind::HeatPump:
      os << "# a: yearly heat pump cost, b: yearly AC cost\n"
         << "var a >= 0\n"
         << "var b >= 0\n"
         << "param rate = " << num(p.real("electricity_rate")) << "\n"
         << "param ac_kwh = " << num(p.real("ac_annual_kwh")) << "\n"
         << "param hp_kwh = " << num(p.real("heat_pump_annual_kwh")) << "\n"
         << "param maintenance = " << num(p.real("maintenance_per_year")) << "\n"
         << "minimize a - b\n"
         << "subject heat_pump_cost: a == hp_kwh * rate + maintenance\n"
         << "subject ac_cost: b == ac_kwh * rate\n";
      break;
    case ProblemKind::BatterySizing:
      os << "var size >= 0\n"
         << "param unit_cost = " << num(p.real("battery_unit_cost")) << "\n"
         << "param rate = " << num(p.real("electricity_rate")) << "\n"
         << "param years = " << num(p.real("years")) << "\n"
         << "param demand = " << num(p.real("evening_demand_kwh")) << "\n"
         << "param solar = " << num(p.real("solar_kwh_per_day")) << "\n"
         << "param efficiency = " << num(p.real("efficiency")) << "\n"
         << "# battery cost grows with the square of its size; the evening gap is bought from the grid\n"
         << "minimize unit_cost * sq(size) + rate * 365 * years * max0(demand - solar - efficiency * size)\n";
      break;
  }
  return os.str();
}

}  // namespace ec::problems
