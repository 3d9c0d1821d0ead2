#include "ec/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ec/error.hpp"

namespace ec::lp {

std::string to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
  }
  return "?";
}

void LpProblem::check() const {
  const std::size_t n = num_cols();
  if (columns.size() != n || lower.size() != n || upper.size() != n)
    throw Error("BadProblem", "column metadata does not match cost vector length");
  if (relations.size() != rows.size() || rhs.size() != rows.size())
    throw Error("BadProblem", "row metadata does not match row count");
  if (!row_labels.empty() && row_labels.size() != rows.size())
    throw Error("BadProblem", "row label count does not match row count");
  if (!std::isfinite(cost_constant)) throw Error("BadProblem", "non-finite cost constant");
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(cost[j])) throw Error("BadProblem", "non-finite cost entry");
    if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] == ir::kInf ||
        upper[j] == -ir::kInf)
      throw Error("BadProblem", "invalid bound");
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != n) throw Error("BadProblem", "row width mismatch");
    if (!std::isfinite(rhs[i])) throw Error("BadProblem", "non-finite rhs");
    for (double a : rows[i])
      if (!std::isfinite(a)) throw Error("BadProblem", "non-finite matrix entry");
  }
}

double LpProblem::max_violation(const std::vector<double>& x) const {
  double worst = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double v = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) v += rows[i][j] * x[j];
    switch (relations[i]) {
      case ir::Relation::Le: worst = std::max(worst, v - rhs[i]); break;
      case ir::Relation::Ge: worst = std::max(worst, rhs[i] - v); break;
      case ir::Relation::Eq: worst = std::max(worst, std::abs(v - rhs[i])); break;
    }
  }
  for (std::size_t j = 0; j < x.size(); ++j) {
    worst = std::max(worst, lower[j] - x[j]);
    worst = std::max(worst, x[j] - upper[j]);
  }
  return worst;
}

double LpProblem::objective(const std::vector<double>& x) const {
  double v = cost_constant;
  for (std::size_t j = 0; j < x.size(); ++j) v += cost[j] * x[j];
  return v;
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kTinyPivot = 1e-11;
constexpr double kReducedCostTol = 1e-9;

// Column j of the original problem expressed through non-negative
// standard-form columns: x_j = offset + sum(sign * y_k).
struct ColumnMap {
  double offset = 0.0;
  std::vector<std::pair<std::size_t, double>> parts;
};

struct StdRow {
  std::vector<double> coef;
  ir::Relation rel;
  double rhs;
};

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : m_(rows), n_(cols), t_((rows + 1) * (cols + 1), 0.0), basis_(rows, 0) {}

  double& at(std::size_t i, std::size_t j) { return t_[i * (n_ + 1) + j]; }
  double at(std::size_t i, std::size_t j) const { return t_[i * (n_ + 1) + j]; }
  double& rhs(std::size_t i) { return at(i, n_); }
  double rhs(std::size_t i) const { return at(i, n_); }
  // Row m_ holds reduced costs.
  double& reduced(std::size_t j) { return at(m_, j); }

  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }
  std::vector<std::size_t>& basis() { return basis_; }

  void pivot(std::size_t r, std::size_t e) {
    const double p = at(r, e);
    for (std::size_t j = 0; j <= n_; ++j) at(r, j) /= p;
    at(r, e) = 1.0;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const double f = at(i, e);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= n_; ++j) at(i, j) -= f * at(r, j);
      at(i, e) = 0.0;
    }
    basis_[r] = e;
  }

  // Install reduced costs d = c - c_B B^-1 A for the current basis.
  void set_costs(const std::vector<double>& c) {
    for (std::size_t j = 0; j <= n_; ++j) at(m_, j) = j < n_ ? c[j] : 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double cb = c[basis_[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= n_; ++j) at(m_, j) -= cb * at(i, j);
    }
  }

  void drop_row(std::size_t r) {
    std::vector<double> next;
    next.reserve(m_ * (n_ + 1));
    for (std::size_t i = 0; i <= m_; ++i)
      if (i != r)
        next.insert(next.end(), t_.begin() + static_cast<std::ptrdiff_t>(i * (n_ + 1)),
                    t_.begin() + static_cast<std::ptrdiff_t>((i + 1) * (n_ + 1)));
    t_ = std::move(next);
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
    --m_;
  }

 private:
  std::size_t m_;
  std::size_t n_;
  std::vector<double> t_;
  std::vector<std::size_t> basis_;
};

enum class Outcome { Optimal, Unbounded };

// Bland's rule: lowest-index improving column, lowest-index leaving variable
// among ratio ties.
Outcome run_simplex(Tableau& t, const std::vector<bool>& allowed, std::size_t& iterations,
                    std::size_t max_iterations) {
  for (;;) {
    std::size_t enter = t.cols();
    for (std::size_t j = 0; j < t.cols(); ++j) {
      if (allowed[j] && t.reduced(j) < -kReducedCostTol) {
        enter = j;
        break;
      }
    }
    if (enter == t.cols()) return Outcome::Optimal;

    double best = std::numeric_limits<double>::infinity();
    bool tiny_only = false;
    for (std::size_t i = 0; i < t.rows(); ++i) {
      const double a = t.at(i, enter);
      if (a > kPivotTol) {
        best = std::min(best, std::max(t.rhs(i), 0.0) / a);
      } else if (a > kTinyPivot) {
        tiny_only = true;
      }
    }
    if (!std::isfinite(best)) {
      if (tiny_only)
        throw Error("NumericalBreakdown", "only near-zero pivots available in entering column");
      return Outcome::Unbounded;
    }
    std::size_t leave = t.rows();
    const double tie = best + 1e-12 * (1.0 + best);
    for (std::size_t i = 0; i < t.rows(); ++i) {
      const double a = t.at(i, enter);
      if (a <= kPivotTol) continue;
      if (std::max(t.rhs(i), 0.0) / a <= tie &&
          (leave == t.rows() || t.basis()[i] < t.basis()[leave]))
        leave = i;
    }
    if (std::abs(t.at(leave, enter)) < kTinyPivot)
      throw Error("NumericalBreakdown", "pivot magnitude below 1e-11");
    t.pivot(leave, enter);
    if (++iterations > max_iterations)
      throw Error("NumericalBreakdown", "simplex iteration limit exceeded");
  }
}

}  // namespace

Solution solve_lp(const LpProblem& p) {
  p.check();
  const std::size_t n = p.num_cols();

  // Shift/split columns so every standard-form variable is >= 0.
  std::vector<ColumnMap> cmap(n);
  std::size_t ny = 0;
  struct BoundRow {
    std::size_t col;
    double width;
  };
  std::vector<BoundRow> bound_rows;
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = p.lower[j], hi = p.upper[j];
    if (lo > hi) {
      Solution s;
      s.status = Status::Infeasible;
      return s;
    }
    if (std::isfinite(lo)) {
      cmap[j].offset = lo;
      cmap[j].parts.push_back({ny, 1.0});
      if (std::isfinite(hi)) bound_rows.push_back({ny, hi - lo});
      ++ny;
    } else if (std::isfinite(hi)) {
      cmap[j].offset = hi;
      cmap[j].parts.push_back({ny++, -1.0});
    } else {
      cmap[j].parts.push_back({ny++, 1.0});
      cmap[j].parts.push_back({ny++, -1.0});
    }
  }

  std::vector<StdRow> rows;
  rows.reserve(p.num_rows() + bound_rows.size());
  for (std::size_t i = 0; i < p.num_rows(); ++i) {
    StdRow r{std::vector<double>(ny, 0.0), p.relations[i], p.rhs[i]};
    for (std::size_t j = 0; j < n; ++j) {
      const double a = p.rows[i][j];
      if (a == 0.0) continue;
      r.rhs -= a * cmap[j].offset;
      for (auto [k, sign] : cmap[j].parts) r.coef[k] += a * sign;
    }
    rows.push_back(std::move(r));
  }
  for (const auto& b : bound_rows) {
    StdRow r{std::vector<double>(ny, 0.0), ir::Relation::Le, b.width};
    r.coef[b.col] = 1.0;
    rows.push_back(std::move(r));
  }

  // Normalize: rhs >= 0, rows equilibrated; empty rows decided immediately.
  std::vector<StdRow> kept;
  for (auto& r : rows) {
    double scale = 0.0;
    for (double a : r.coef) scale = std::max(scale, std::abs(a));
    if (scale == 0.0) {
      const bool ok = (r.rel == ir::Relation::Le && 0.0 <= r.rhs + kFeasibilityTol) ||
                      (r.rel == ir::Relation::Ge && 0.0 >= r.rhs - kFeasibilityTol) ||
                      (r.rel == ir::Relation::Eq && std::abs(r.rhs) <= kFeasibilityTol);
      if (!ok) {
        Solution s;
        s.status = Status::Infeasible;
        return s;
      }
      continue;
    }
    for (double& a : r.coef) a /= scale;
    r.rhs /= scale;
    if (r.rhs < 0.0) {
      for (double& a : r.coef) a = -a;
      r.rhs = -r.rhs;
      if (r.rel == ir::Relation::Le) r.rel = ir::Relation::Ge;
      else if (r.rel == ir::Relation::Ge) r.rel = ir::Relation::Le;
    }
    kept.push_back(std::move(r));
  }

  const std::size_t m = kept.size();
  std::size_t n_slack = 0, n_art = 0;
  for (const auto& r : kept) {
    if (r.rel != ir::Relation::Eq) ++n_slack;
    if (r.rel != ir::Relation::Le) ++n_art;
  }
  const std::size_t ncols = ny + n_slack + n_art;
  Tableau t(m, ncols);
  std::vector<bool> is_art(ncols, false);
  {
    std::size_t s = ny, a = ny + n_slack;
    for (std::size_t i = 0; i < m; ++i) {
      const auto& r = kept[i];
      for (std::size_t k = 0; k < ny; ++k) t.at(i, k) = r.coef[k];
      t.rhs(i) = r.rhs;
      if (r.rel == ir::Relation::Le) {
        t.at(i, s) = 1.0;
        t.basis()[i] = s++;
      } else {
        if (r.rel == ir::Relation::Ge) t.at(i, s++) = -1.0;
        t.at(i, a) = 1.0;
        is_art[a] = true;
        t.basis()[i] = a++;
      }
    }
  }

  std::size_t iterations = 0;
  const std::size_t max_iter = 200 * (m + ncols) + 1000;

  // Phase 1: minimize the sum of artificials.
  if (n_art > 0) {
    std::vector<double> c1(ncols, 0.0);
    for (std::size_t j = 0; j < ncols; ++j)
      if (is_art[j]) c1[j] = 1.0;
    t.set_costs(c1);
    std::vector<bool> allowed(ncols, true);
    run_simplex(t, allowed, iterations, max_iter);
    double infeas = 0.0, scale = 1.0;
    for (std::size_t i = 0; i < t.rows(); ++i) {
      if (is_art[t.basis()[i]]) infeas += std::max(t.rhs(i), 0.0);
    }
    for (const auto& r : kept) scale += r.rhs;
    if (infeas > 1e-9 * scale) {
      Solution s;
      s.status = Status::Infeasible;
      s.iterations = iterations;
      return s;
    }
    // Drive remaining (zero-valued) artificials out of the basis.
    for (std::size_t i = 0; i < t.rows();) {
      if (!is_art[t.basis()[i]]) {
        ++i;
        continue;
      }
      std::size_t pick = ncols;
      for (std::size_t j = 0; j < ncols; ++j) {
        if (!is_art[j] && std::abs(t.at(i, j)) > kPivotTol) {
          pick = j;
          break;
        }
      }
      if (pick == ncols) {
        t.drop_row(i);  // redundant equality
        continue;
      }
      t.pivot(i, pick);
      ++i;
    }
  }

  // Phase 2.
  std::vector<double> c2(ncols, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    for (auto [k, sign] : cmap[j].parts) c2[k] += p.cost[j] * sign;
  t.set_costs(c2);
  std::vector<bool> allowed(ncols, true);
  for (std::size_t j = 0; j < ncols; ++j)
    if (is_art[j]) allowed[j] = false;
  if (run_simplex(t, allowed, iterations, max_iter) == Outcome::Unbounded) {
    Solution s;
    s.status = Status::Unbounded;
    s.iterations = iterations;
    return s;
  }

  std::vector<double> y(ncols, 0.0);
  for (std::size_t i = 0; i < t.rows(); ++i) y[t.basis()[i]] = std::max(t.rhs(i), 0.0);
  std::vector<double> x(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double v = cmap[j].offset;
    for (auto [k, sign] : cmap[j].parts) v += sign * y[k];
    x[j] = std::clamp(v, p.lower[j], p.upper[j]);
  }
  if (p.max_violation(x) > kFeasibilityTol)
    throw Error("NumericalBreakdown", "simplex result violates constraints beyond 1e-7");

  Solution s;
  s.status = Status::Optimal;
  s.iterations = iterations;
  s.objective = p.objective(x);
  for (std::size_t j = 0; j < n; ++j) s.assignment[p.columns[j]] = x[j];
  return s;
}

// ---------------------------------------------------------------------------
// Scalar problems

double ScalarProblem::value(double x) const {
  for (const auto& piece : pieces)
    if (x <= piece.hi) return piece.value(x);
  return pieces.back().value(x);
}

void ScalarProblem::check() const {
  if (pieces.empty()) throw Error("BadProblem", "scalar problem has no pieces");
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const auto& pc = pieces[i];
    if (!(pc.lo <= pc.hi)) throw Error("BadProblem", "piece with empty interval");
    if (pc.a < -1e-12) throw Error("BadProblem", "piece with negative curvature");
    if (!std::isfinite(pc.a) || !std::isfinite(pc.b) || !std::isfinite(pc.c))
      throw Error("BadProblem", "non-finite piece coefficients");
    if (i == 0) continue;
    const auto& prev = pieces[i - 1];
    if (prev.hi != pc.lo) throw Error("BadProblem", "pieces are not contiguous");
    const double x = pc.lo;
    const double left = prev.value(x), right = pc.value(x);
    if (std::abs(left - right) > 1e-9 * (1.0 + std::abs(left)))
      throw Error("BadProblem", "discontinuity at breakpoint");
    const double dl = 2 * prev.a * x + prev.b, dr = 2 * pc.a * x + pc.b;
    if (dl > dr + 1e-9 * (1.0 + std::abs(dl)))
      throw Error("BadProblem", "slope decreases at breakpoint (non-convex)");
  }
}

Solution solve_scalar(const ScalarProblem& p) {
  p.check();
  double best_x = 0.0, best_f = std::numeric_limits<double>::infinity();
  bool found = false;
  auto consider = [&](double x, double f) {
    if (!found || f < best_f || (f == best_f && x < best_x)) {
      best_x = x;
      best_f = f;
      found = true;
    }
  };
  for (const auto& pc : p.pieces) {
    if (pc.a > 0.0) {
      const double v = -pc.b / (2.0 * pc.a);
      if (std::isfinite(v)) {
        const double x = std::clamp(v, pc.lo, pc.hi);
        consider(x, pc.value(x));
        continue;
      }
      if (std::isfinite(pc.lo) && std::isfinite(pc.hi)) {
        const double x = golden_section([&](double z) { return pc.value(z); }, pc.lo, pc.hi);
        consider(x, pc.value(x));
        continue;
      }
    }
    // Linear piece (or curvature too small to matter).
    if (pc.b > 0.0) {
      if (!std::isfinite(pc.lo)) return Solution{Status::Unbounded, {}, std::nullopt};
      consider(pc.lo, pc.value(pc.lo));
    } else if (pc.b < 0.0) {
      if (!std::isfinite(pc.hi)) return Solution{Status::Unbounded, {}, std::nullopt};
      consider(pc.hi, pc.value(pc.hi));
    } else {
      const double x = std::isfinite(pc.lo) ? pc.lo : (std::isfinite(pc.hi) ? pc.hi : 0.0);
      consider(x, pc.value(x));
    }
  }
  Solution s;
  s.status = Status::Optimal;
  s.assignment[p.variable] = best_x;
  s.objective = best_f;
  return s;
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::ordered_json to_json(const Solution& s) {
  nlohmann::ordered_json j;
  j["status"] = to_string(s.status);
  if (s.status == Status::Optimal) {
    j["objective"] = s.objective.value_or(0.0);
    nlohmann::ordered_json a = nlohmann::ordered_json::object();
    for (const auto& [ref, v] : s.assignment) a[ref.str()] = v;
    j["assignment"] = std::move(a);
  }
  j["tolerances"] = {{"feasibility", s.feasibility_tol}, {"optimality", s.optimality_tol}};
  j["iterations"] = s.iterations;
  return j;
}

namespace {

ir::VarRef parse_ref(const std::string& s) {
  const auto open = s.find('[');
  if (open == std::string::npos || s.back() != ']') return {s, std::nullopt};
  return {s.substr(0, open), std::stoul(s.substr(open + 1, s.size() - open - 2))};
}

}  // namespace

Solution solution_from_json(const nlohmann::json& j) {
  Solution s;
  const auto status = j.at("status").get<std::string>();
  if (status == "optimal") s.status = Status::Optimal;
  else if (status == "infeasible") s.status = Status::Infeasible;
  else if (status == "unbounded") s.status = Status::Unbounded;
  else throw Error("BadJson", "unknown solution status '" + status + "'");
  if (s.status == Status::Optimal) {
    s.objective = j.at("objective").get<double>();
    for (const auto& [k, v] : j.at("assignment").items()) s.assignment[parse_ref(k)] = v.get<double>();
  }
  if (j.contains("tolerances")) {
    s.feasibility_tol = j["tolerances"].value("feasibility", kFeasibilityTol);
    s.optimality_tol = j["tolerances"].value("optimality", kOptimalityTol);
  }
  s.iterations = j.value("iterations", std::size_t{0});
  return s;
}

}  // namespace ec::lp
