#include "ec/lower.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ec/error.hpp"

namespace ec::ir {

namespace {

bool has_variable_square(const OptInstance& inst) {
  return std::any_of(inst.objective.begin(), inst.objective.end(), [](const ConvexTerm& t) {
    return t.kind == TermKind::Square && !t.inner.is_constant();
  });
}

std::set<VarRef> referenced(const OptInstance& inst) {
  std::set<VarRef> refs;
  for (const auto& t : inst.objective)
    for (const auto& [r, c] : t.inner.terms()) refs.insert(r);
  for (const auto& c : inst.constraints)
    for (const auto& [r, a] : c.lhs.terms()) refs.insert(r);
  return refs;
}

double bound_of(const OptInstance& inst, const VarRef& ref, bool upper) {
  const Variable* v = inst.find_variable(ref.name);
  const std::size_t k = ref.index.value_or(0);
  return upper ? v->upper[k] : v->lower[k];
}

// Coefficient of `v` and constant part of a single-variable affine expression.
std::pair<double, double> affine_parts(const LinExpr& e) {
  return {e.terms().empty() ? 0.0 : e.terms().front().second, e.constant()};
}

Lowered lower_scalar(const OptInstance& inst, const VarRef& v) {
  Lowered out;
  double lo = bound_of(inst, v, false), hi = bound_of(inst, v, true);
  for (const auto& c : inst.constraints) {
    const auto [a, k] = affine_parts(c.lhs);
    const double rhs = c.rhs - k;
    if (a == 0.0) {
      if (c.violation({}) > lp::kFeasibilityTol) out.empty_domain = true;
      continue;
    }
    const double bound = rhs / a;
    Relation rel = c.relation;
    if (a < 0.0 && rel != Relation::Eq) rel = rel == Relation::Le ? Relation::Ge : Relation::Le;
    if (rel != Relation::Ge) hi = std::min(hi, bound);
    if (rel != Relation::Le) lo = std::max(lo, bound);
  }
  if (lo > hi) out.empty_domain = true;

  for (const auto& ref : inst.element_refs()) {
    if (ref == v) continue;
    const double blo = bound_of(inst, ref, false), bhi = bound_of(inst, ref, true);
    out.pinned[ref] = std::isfinite(blo) ? blo : (std::isfinite(bhi) ? bhi : 0.0);
  }

  lp::ScalarProblem sp;
  sp.variable = v;
  if (out.empty_domain) {
    sp.pieces.push_back({0.0, 0.0, 0.0, 0.0, 0.0});
    out.problem = std::move(sp);
    return out;
  }

  std::vector<double> cuts{lo};
  for (const auto& t : inst.objective) {
    if (t.kind != TermKind::Abs && t.kind != TermKind::Hinge0) continue;
    const auto [a, k] = affine_parts(t.inner);
    if (a == 0.0) continue;
    const double x0 = -k / a;
    if (x0 > lo && x0 < hi) cuts.push_back(x0);
  }
  cuts.push_back(hi);
  std::sort(cuts.begin() + 1, cuts.end() - 1);
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  if (cuts.size() == 1) cuts.push_back(cuts.front());

  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    lp::QuadPiece pc{cuts[i], cuts[i + 1], 0.0, 0.0, 0.0};
    double probe;
    if (std::isfinite(pc.lo) && std::isfinite(pc.hi)) probe = 0.5 * (pc.lo + pc.hi);
    else if (std::isfinite(pc.hi)) probe = pc.hi - 1.0;
    else if (std::isfinite(pc.lo)) probe = pc.lo + 1.0;
    else probe = 0.0;
    for (const auto& t : inst.objective) {
      const auto [a, k] = affine_parts(t.inner);
      const double w = t.weight;
      const double inner_at_probe = a * probe + k;
      switch (t.kind) {
        case TermKind::Linear:
          pc.b += w * a;
          pc.c += w * k;
          break;
        case TermKind::Abs: {
          const double s = inner_at_probe >= 0.0 ? 1.0 : -1.0;
          pc.b += w * s * a;
          pc.c += w * s * k;
          break;
        }
        case TermKind::Hinge0:
          if (inner_at_probe > 0.0) {
            pc.b += w * a;
            pc.c += w * k;
          }
          break;
        case TermKind::Square:
          pc.a += w * a * a;
          pc.b += 2.0 * w * a * k;
          pc.c += w * k * k;
          break;
      }
    }
    sp.pieces.push_back(pc);
  }
  out.problem = std::move(sp);
  return out;
}

Lowered lower_linear(const OptInstance& inst) {
  lp::LpProblem p;
  std::map<VarRef, std::size_t> col;
  for (const auto& v : inst.variables) {
    for (std::size_t i = 0; i < v.length; ++i) {
      VarRef ref{v.name, v.is_vector ? std::optional<std::size_t>(i) : std::nullopt};
      col[ref] = p.columns.size();
      p.columns.push_back(ref);
      p.lower.push_back(v.lower[i]);
      p.upper.push_back(v.upper[i]);
      p.cost.push_back(0.0);
    }
  }
  const std::size_t n_orig = p.columns.size();

  // Aux columns are appended, so rows are widened lazily at the end.
  struct Row {
    std::vector<std::pair<std::size_t, double>> coefs;
    Relation rel;
    double rhs;
    std::string label;
  };
  std::vector<Row> rows;
  auto add_aux = [&](double weight) {
    const std::size_t k = p.columns.size() - n_orig;
    p.columns.push_back({"_aux", k});
    p.lower.push_back(0.0);
    p.upper.push_back(kInf);
    p.cost.push_back(weight);
    return p.columns.size() - 1;
  };
  auto expr_row = [&](const LinExpr& e, double sign) {
    std::vector<std::pair<std::size_t, double>> out;
    for (const auto& [ref, c] : e.terms()) out.push_back({col.at(ref), sign * c});
    return out;
  };

  for (const auto& c : inst.constraints)
    rows.push_back({expr_row(c.lhs, 1.0), c.relation, c.rhs - c.lhs.constant(), c.label});

  for (std::size_t ti = 0; ti < inst.objective.size(); ++ti) {
    const auto& t = inst.objective[ti];
    const std::string tag = "objective[" + std::to_string(ti) + "]";
    if (t.kind == TermKind::Linear || t.kind == TermKind::Square) {
      // Square terms only reach here with constant inner expressions.
      if (t.kind == TermKind::Square) {
        p.cost_constant += t.weight * t.inner.constant() * t.inner.constant();
        continue;
      }
      for (const auto& [ref, c] : t.inner.terms()) p.cost[col.at(ref)] += t.weight * c;
      p.cost_constant += t.weight * t.inner.constant();
      continue;
    }
    if (t.inner.is_constant()) {
      const double k = t.inner.constant();
      p.cost_constant += t.weight * (t.kind == TermKind::Abs ? std::abs(k) : std::max(k, 0.0));
      continue;
    }
    if (t.weight == 0.0) continue;
    const std::size_t aux = add_aux(t.weight);
    // e - t <= -const
    auto up = expr_row(t.inner, 1.0);
    up.push_back({aux, -1.0});
    rows.push_back({std::move(up), Relation::Le, -t.inner.constant(), tag + " epigraph"});
    if (t.kind == TermKind::Abs) {
      auto down = expr_row(t.inner, -1.0);
      down.push_back({aux, -1.0});
      rows.push_back({std::move(down), Relation::Le, t.inner.constant(), tag + " epigraph"});
    }
  }

  const std::size_t n = p.columns.size();
  for (auto& r : rows) {
    std::vector<double> dense(n, 0.0);
    for (auto [j, c] : r.coefs) dense[j] += c;
    p.rows.push_back(std::move(dense));
    p.relations.push_back(r.rel);
    p.rhs.push_back(r.rhs);
    p.row_labels.push_back(std::move(r.label));
  }
  Lowered out;
  out.num_aux = n - n_orig;
  out.problem = std::move(p);
  return out;
}

}  // namespace

Lowered lower_to_lp(const OptInstance& inst) {
  if (auto issues = validate(inst); !issues.empty())
    throw Error("InvalidInstance", issues.front().location + ": " + issues.front().message);
  if (!has_variable_square(inst)) return lower_linear(inst);

  const auto refs = referenced(inst);
  if (refs.size() != 1)
    throw Error("UnsupportedForm",
                "square terms are only supported when the problem involves a single scalar variable");
  return lower_scalar(inst, *refs.begin());
}

lp::Solution solve(const OptInstance& inst) {
  Lowered low = lower_to_lp(inst);
  lp::Solution s;
  if (low.is_lp()) {
    s = lp::solve_lp(low.lp());
    if (s.status != lp::Status::Optimal) return s;
    std::erase_if(s.assignment, [](const auto& kv) { return kv.first.name == "_aux"; });
  } else {
    if (low.empty_domain) {
      s.status = lp::Status::Infeasible;
      return s;
    }
    s = lp::solve_scalar(low.scalar());
    if (s.status != lp::Status::Optimal) return s;
    s.assignment.insert(low.pinned.begin(), low.pinned.end());
  }
  s.objective = inst.objective_value(s.assignment);
  return s;
}

}  // namespace ec::ir
