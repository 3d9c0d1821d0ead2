// Ground-truth optima computed without the LP solver.

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ec/problems.hpp"

namespace ec::problems {

namespace {

using ir::VarRef;

lp::Solution optimal(std::map<VarRef, double> assignment, double objective) {
  lp::Solution s;
  s.status = lp::Status::Optimal;
  s.assignment = std::move(assignment);
  s.objective = objective;
  return s;
}

VarRef scalar(const char* name) { return VarRef{name, std::nullopt}; }

lp::Solution ev_oracle(const ElicitedParams& p) {
  const auto& price = p.vec("prices");
  const double P = p.real("charger_max_kw");
  double remaining = p.real("energy_kwh");
  std::vector<std::size_t> order(price.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return price[a] < price[b]; });
  std::vector<double> x(price.size(), 0.0);
  for (std::size_t t : order) {
    if (remaining <= 0.0) break;
    x[t] = std::min(P, remaining);
    remaining -= x[t];
  }
  std::map<VarRef, double> a;
  double cost = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    a[VarRef{"x", t}] = x[t];
    cost += price[t] * x[t];
  }
  return optimal(std::move(a), cost);
}

lp::Solution hvac_oracle(const ElicitedParams& p) {
  const Interval band = p.interval("comfort_band");
  const double y = p.real("ambient_temp");
  const double x = std::clamp(y, band.lo, band.hi);
  const double cost =
      p.real("electricity_cost") * std::abs(x - y) / p.real("efficiency") * p.real("occupancy_hours");
  return optimal({{scalar("temp"), x}}, cost);
}

// Convex piecewise-linear function on [pts.front().x, pts.back().x].
struct Pwl {
  std::vector<std::pair<double, double>> pts;

  double lo() const { return pts.front().first; }
  double hi() const { return pts.back().first; }
  double operator()(double x) const {
    if (pts.size() == 1 || x <= pts.front().first) return pts.front().second;
    if (x >= pts.back().first) return pts.back().second;
    auto it = std::lower_bound(pts.begin(), pts.end(), x,
                               [](const auto& pt, double v) { return pt.first < v; });
    if (it->first == x) return it->second;
    const auto& [x1, y1] = *it;
    const auto& [x0, y0] = *(it - 1);
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
  }
  double leftmost_argmin() const {
    auto best = pts.front();
    for (const auto& pt : pts)
      if (pt.second < best.second) best = pt;
    return best.first;
  }
};

// Backward value-function recursion over the state of charge. Each stage
// function stays convex piecewise linear, and its breakpoints are exactly the
// shifted breakpoints of the next stage plus the clamp switch points, so the
// recursion is exact.
lp::Solution dispatch_oracle(const ElicitedParams& p) {
  const auto& price = p.vec("prices");
  const auto& solar = p.vec("solar");
  const auto& demand = p.vec("demand");
  const std::size_t T = price.size();
  const double P = p.real("max_power_kw"), B = p.real("capacity_kwh");
  const bool no_export = p.has("no_export") && p.text("no_export") == "yes";

  std::vector<double> lo(T);
  for (std::size_t t = 0; t < T; ++t) lo[t] = no_export ? std::max(-P, solar[t] - demand[t]) : -P;

  lp::Solution infeasible;
  infeasible.status = lp::Status::Infeasible;

  // W[t](u) = price_t * u + V[t+1](u); ustar[t] its leftmost minimizer.
  std::vector<Pwl> W(T);
  std::vector<double> ustar(T);
  Pwl next{{{0.0, 0.0}}};  // V[T]: only b = 0 allowed.
  for (std::size_t k = T; k-- > 0;) {
    if (lo[k] > P) return infeasible;
    Pwl w = next;
    for (auto& [u, v] : w.pts) v += price[k] * u;
    const double us = w.leftmost_argmin();
    W[k] = w;
    ustar[k] = us;

    const double dlo = std::max(0.0, w.lo() - P);
    const double dhi = std::min(B, w.hi() - lo[k]);
    if (dlo > dhi) return infeasible;
    std::vector<double> cand{dlo, dhi, us - P, us - lo[k]};
    for (const auto& [u, v] : w.pts) {
      cand.push_back(u - P);
      cand.push_back(u - lo[k]);
    }
    std::vector<double> xs;
    for (double c : cand)
      if (c >= dlo && c <= dhi) xs.push_back(c);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    Pwl v;
    for (double b : xs) v.pts.push_back({b, -price[k] * b + w(std::clamp(us, b + lo[k], b + P))});
    next = std::move(v);
  }
  if (next.lo() > 0.0 || next.hi() < 0.0) return infeasible;

  std::map<VarRef, double> a;
  double b = 0.0, cost = 0.0;
  a[VarRef{"b", 0}] = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    const double u = std::clamp(ustar[t], b + lo[t], b + P);
    const double x = u - b;
    a[VarRef{"x", t}] = x;
    a[VarRef{"b", t + 1}] = u;
    cost += price[t] * (x - solar[t] + demand[t]);
    b = u;
  }
  return optimal(std::move(a), cost);
}

lp::Solution pv_oracle(const ElicitedParams& p) {
  // U = B - p_r * A is nonincreasing in A, so the roof limit is optimal.
  const double A = p.real("roof_area_sqft");
  return optimal({{scalar("area"), A}}, p.real("budget") - p.real("panel_price_per_sqft") * A);
}

lp::Solution heat_pump_oracle(const ElicitedParams& p) {
  const double r = p.real("electricity_rate");
  const double a = p.real("heat_pump_annual_kwh") * r + p.real("maintenance_per_year");
  const double b = p.real("ac_annual_kwh") * r;
  return optimal({{scalar("a"), a}, {scalar("b"), b}}, a - b);
}

lp::Solution battery_sizing_oracle(const ElicitedParams& p) {
  const double pbat = p.real("battery_unit_cost"), rate = p.real("electricity_rate");
  const double years = p.real("years"), D = p.real("evening_demand_kwh");
  const double S = p.real("solar_kwh_per_day"), eta = p.real("efficiency");
  const double B = battery_sizing_closed_form(pbat, rate, years, D, S, eta);
  const double K = rate * 365.0 * years;
  return optimal({{scalar("size"), B}}, pbat * B * B + K * std::max(0.0, D - S - eta * B));
}

}  // namespace

double battery_sizing_closed_form(double unit_cost, double rate, double years, double demand,
                                  double solar, double eta) {
  const double deficit = demand - solar;
  if (deficit <= 0.0) return 0.0;
  const double kink = deficit / eta;
  if (unit_cost <= 0.0) return kink;
  const double K = rate * 365.0 * years;
  return std::min(K * eta / (2.0 * unit_cost), kink);
}

lp::Solution oracle(const ElicitedParams& p) {
  (void)build(p);  // same precondition errors as the builders
  switch (p.kind()) {
    case ProblemKind::EvCharging: return ev_oracle(p);
    case ProblemKind::HvacSetpoint: return hvac_oracle(p);
    case ProblemKind::BatteryDispatch: return dispatch_oracle(p);
    case ProblemKind::PvSizing: return pv_oracle(p);
    case ProblemKind::HeatPump: return heat_pump_oracle(p);
    case ProblemKind::BatterySizing: return battery_sizing_oracle(p);
  }
  throw Error("UnknownKind", "unknown problem kind");
}

}  // namespace ec::problems
