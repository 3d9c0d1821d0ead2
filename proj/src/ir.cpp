#include "ec/ir.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ec/error.hpp"

namespace ec::ir {

std::string VarRef::str() const {
  if (!index) return name;
  return name + "[" + std::to_string(*index) + "]";
}

bool is_valid_identifier(const std::string& name) {
  if (name.empty() || name.front() < 'a' || name.front() > 'z') return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
  });
}

// ---------------------------------------------------------------------------
// LinExpr

LinExpr::LinExpr(std::vector<Term> terms, double constant)
    : terms_(std::move(terms)), constant_(constant) {
  normalize();
}

LinExpr LinExpr::var(VarRef ref, double coef) {
  return LinExpr({{std::move(ref), coef}}, 0.0);
}

void LinExpr::normalize() {
  std::stable_sort(terms_.begin(), terms_.end(),
                   [](const Term& a, const Term& b) { return a.first < b.first; });
  std::vector<Term> merged;
  merged.reserve(terms_.size());
  for (auto& t : terms_) {
    if (!merged.empty() && merged.back().first == t.first) {
      merged.back().second += t.second;
    } else {
      merged.push_back(std::move(t));
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.second == 0.0; });
  terms_ = std::move(merged);
}

LinExpr& LinExpr::operator+=(const LinExpr& other) {
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  constant_ += other.constant_;
  normalize();
  return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& other) { return *this += -other; }

LinExpr& LinExpr::operator*=(double s) {
  for (auto& t : terms_) t.second *= s;
  constant_ *= s;
  normalize();
  return *this;
}

LinExpr LinExpr::operator-() const {
  LinExpr out = *this;
  for (auto& t : out.terms_) t.second = -t.second;
  out.constant_ = -out.constant_;
  return out;
}

double LinExpr::evaluate(const std::map<VarRef, double>& values) const {
  double v = constant_;
  for (const auto& [ref, coef] : terms_) {
    auto it = values.find(ref);
    if (it != values.end()) v += coef * it->second;
  }
  return v;
}

double ConvexTerm::evaluate(const std::map<VarRef, double>& values) const {
  const double e = inner.evaluate(values);
  switch (kind) {
    case TermKind::Linear: return weight * e;
    case TermKind::Abs: return weight * std::abs(e);
    case TermKind::Hinge0: return weight * std::max(e, 0.0);
    case TermKind::Square: return weight * e * e;
  }
  return 0.0;
}

double Constraint::violation(const std::map<VarRef, double>& values) const {
  const double v = lhs.evaluate(values);
  switch (relation) {
    case Relation::Le: return std::max(0.0, v - rhs);
    case Relation::Ge: return std::max(0.0, rhs - v);
    case Relation::Eq: return std::abs(v - rhs);
  }
  return 0.0;
}

Variable Variable::scalar(std::string name, double lo, double hi) {
  return Variable{std::move(name), 1, false, {lo}, {hi}};
}

Variable Variable::vector(std::string name, std::size_t length, double lo, double hi) {
  return Variable{std::move(name), length, true, std::vector<double>(length, lo),
                  std::vector<double>(length, hi)};
}

const Variable* OptInstance::find_variable(const std::string& name) const {
  for (const auto& v : variables)
    if (v.name == name) return &v;
  return nullptr;
}

std::vector<VarRef> OptInstance::element_refs() const {
  std::vector<VarRef> refs;
  for (const auto& v : variables) {
    if (!v.is_vector) {
      refs.push_back({v.name, std::nullopt});
      continue;
    }
    for (std::size_t i = 0; i < v.length; ++i) refs.push_back({v.name, i});
  }
  return refs;
}

double OptInstance::objective_value(const std::map<VarRef, double>& values) const {
  double total = 0.0;
  for (const auto& t : objective) total += t.evaluate(values);
  return total;
}

double OptInstance::max_violation(const std::map<VarRef, double>& values) const {
  double worst = 0.0;
  for (const auto& c : constraints) worst = std::max(worst, c.violation(values));
  for (const auto& v : variables) {
    for (std::size_t i = 0; i < v.length; ++i) {
      VarRef ref{v.name, v.is_vector ? std::optional<std::size_t>(i) : std::nullopt};
      auto it = values.find(ref);
      const double x = it == values.end() ? 0.0 : it->second;
      if (i < v.lower.size()) worst = std::max(worst, v.lower[i] - x);
      if (i < v.upper.size()) worst = std::max(worst, x - v.upper[i]);
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// validate

std::string to_string(IssueCode code) {
  switch (code) {
    case IssueCode::UnboundVar: return "UnboundVar";
    case IssueCode::IndexOutOfRange: return "IndexOutOfRange";
    case IssueCode::NonConvexWeight: return "NonConvexWeight";
    case IssueCode::EmptyObjective: return "EmptyObjective";
    case IssueCode::BadBounds: return "BadBounds";
    case IssueCode::NoVariables: return "NoVariables";
    case IssueCode::NonFinite: return "NonFinite";
    case IssueCode::BadIdentifier: return "BadIdentifier";
    case IssueCode::SquareArity: return "SquareArity";
  }
  return "Unknown";
}

std::string to_string(Relation rel) {
  switch (rel) {
    case Relation::Le: return "<=";
    case Relation::Eq: return "==";
    case Relation::Ge: return ">=";
  }
  return "?";
}

std::string to_string(TermKind kind) {
  switch (kind) {
    case TermKind::Linear: return "linear";
    case TermKind::Abs: return "abs";
    case TermKind::Hinge0: return "hinge0";
    case TermKind::Square: return "square";
  }
  return "?";
}

namespace {

void check_expr(const OptInstance& inst, const LinExpr& e, const std::string& where,
                std::vector<ValidationIssue>& out) {
  if (!std::isfinite(e.constant()))
    out.push_back({IssueCode::NonFinite, "non-finite constant", where});
  for (const auto& [ref, coef] : e.terms()) {
    if (!std::isfinite(coef))
      out.push_back({IssueCode::NonFinite, "non-finite coefficient on " + ref.str(), where});
    const Variable* v = inst.find_variable(ref.name);
    if (v == nullptr) {
      out.push_back({IssueCode::UnboundVar, "undeclared variable '" + ref.name + "'", where});
      continue;
    }
    if (v->is_vector != ref.index.has_value()) {
      out.push_back({IssueCode::IndexOutOfRange,
                     v->is_vector ? "vector '" + ref.name + "' used without index"
                                  : "scalar '" + ref.name + "' used with index",
                     where});
    } else if (ref.index && *ref.index >= v->length) {
      out.push_back({IssueCode::IndexOutOfRange,
                     ref.str() + " outside length " + std::to_string(v->length), where});
    }
  }
}

}  // namespace

std::vector<ValidationIssue> validate(const OptInstance& inst) {
  std::vector<ValidationIssue> out;
  if (inst.variables.empty())
    out.push_back({IssueCode::NoVariables, "instance declares no variables", "variables"});
  for (std::size_t i = 0; i < inst.variables.size(); ++i) {
    const auto& v = inst.variables[i];
    const std::string where = "variables[" + std::to_string(i) + "]";
    if (!is_valid_identifier(v.name))
      out.push_back({IssueCode::BadIdentifier, "bad variable name '" + v.name + "'", where});
    for (std::size_t j = 0; j < i; ++j)
      if (inst.variables[j].name == v.name)
        out.push_back({IssueCode::BadIdentifier, "duplicate variable '" + v.name + "'", where});
    if (v.length == 0 || (!v.is_vector && v.length != 1) || v.lower.size() != v.length ||
        v.upper.size() != v.length) {
      out.push_back({IssueCode::BadBounds, "bound vectors do not match length", where});
      continue;
    }
    for (std::size_t k = 0; k < v.length; ++k) {
      if (std::isnan(v.lower[k]) || std::isnan(v.upper[k]) || v.lower[k] == kInf ||
          v.upper[k] == -kInf) {
        out.push_back({IssueCode::NonFinite, "invalid bound on element " + std::to_string(k), where});
      } else if (v.lower[k] > v.upper[k]) {
        out.push_back({IssueCode::BadBounds,
                       "lower bound exceeds upper bound on element " + std::to_string(k), where});
      }
    }
  }
  if (inst.objective.empty())
    out.push_back({IssueCode::EmptyObjective, "objective has no terms", "objective"});
  for (std::size_t i = 0; i < inst.objective.size(); ++i) {
    const auto& t = inst.objective[i];
    const std::string where = "objective[" + std::to_string(i) + "]";
    check_expr(inst, t.inner, where, out);
    if (!std::isfinite(t.weight)) {
      out.push_back({IssueCode::NonFinite, "non-finite weight", where});
    } else if (t.kind != TermKind::Linear && t.weight < 0.0) {
      out.push_back({IssueCode::NonConvexWeight,
                     to_string(t.kind) + " term with negative weight", where});
    }
    if (t.kind == TermKind::Square && t.inner.terms().size() > 1)
      out.push_back({IssueCode::SquareArity, "square term references more than one variable", where});
  }
  for (std::size_t i = 0; i < inst.constraints.size(); ++i) {
    const auto& c = inst.constraints[i];
    const std::string where = "constraints[" + std::to_string(i) + "]";
    check_expr(inst, c.lhs, where, out);
    if (!std::isfinite(c.rhs)) out.push_back({IssueCode::NonFinite, "non-finite rhs", where});
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

nlohmann::ordered_json bound_json(double v) {
  if (std::isinf(v)) return nullptr;
  return v;
}

double bound_from_json(const nlohmann::json& j, double if_null) {
  return j.is_null() ? if_null : j.get<double>();
}

Relation relation_from_string(const std::string& s) {
  if (s == "<=") return Relation::Le;
  if (s == "==") return Relation::Eq;
  if (s == ">=") return Relation::Ge;
  throw Error("BadJson", "unknown relation '" + s + "'");
}

TermKind kind_from_string(const std::string& s) {
  if (s == "linear") return TermKind::Linear;
  if (s == "abs") return TermKind::Abs;
  if (s == "hinge0") return TermKind::Hinge0;
  if (s == "square") return TermKind::Square;
  throw Error("BadJson", "unknown term kind '" + s + "'");
}

}  // namespace

nlohmann::ordered_json to_json(const LinExpr& e) {
  nlohmann::ordered_json terms = nlohmann::ordered_json::array();
  for (const auto& [ref, coef] : e.terms()) {
    nlohmann::ordered_json t;
    t["var"] = ref.name;
    t["index"] = ref.index ? nlohmann::ordered_json(*ref.index) : nlohmann::ordered_json(nullptr);
    t["coef"] = coef;
    terms.push_back(std::move(t));
  }
  nlohmann::ordered_json j;
  j["terms"] = std::move(terms);
  j["constant"] = e.constant();
  return j;
}

nlohmann::ordered_json to_json(const OptInstance& inst) {
  nlohmann::ordered_json j;
  j["variables"] = nlohmann::ordered_json::array();
  for (const auto& v : inst.variables) {
    nlohmann::ordered_json jv;
    jv["name"] = v.name;
    jv["length"] = v.length;
    jv["vector"] = v.is_vector;
    jv["lower"] = nlohmann::ordered_json::array();
    jv["upper"] = nlohmann::ordered_json::array();
    for (double lo : v.lower) jv["lower"].push_back(bound_json(lo));
    for (double hi : v.upper) jv["upper"].push_back(bound_json(hi));
    j["variables"].push_back(std::move(jv));
  }
  j["objective"] = nlohmann::ordered_json::array();
  for (const auto& t : inst.objective) {
    nlohmann::ordered_json jt;
    jt["kind"] = to_string(t.kind);
    jt["weight"] = t.weight;
    jt["inner"] = to_json(t.inner);
    j["objective"].push_back(std::move(jt));
  }
  j["constraints"] = nlohmann::ordered_json::array();
  for (const auto& c : inst.constraints) {
    nlohmann::ordered_json jc;
    jc["label"] = c.label;
    jc["lhs"] = to_json(c.lhs);
    jc["relation"] = to_string(c.relation);
    jc["rhs"] = c.rhs;
    j["constraints"].push_back(std::move(jc));
  }
  j["metadata"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : inst.metadata) j["metadata"][k] = v;
  return j;
}

LinExpr lin_expr_from_json(const nlohmann::json& j) {
  std::vector<LinExpr::Term> terms;
  for (const auto& t : j.at("terms")) {
    VarRef ref{t.at("var").get<std::string>(), std::nullopt};
    if (t.contains("index") && !t.at("index").is_null())
      ref.index = t.at("index").get<std::size_t>();
    terms.emplace_back(std::move(ref), t.at("coef").get<double>());
  }
  return LinExpr(std::move(terms), j.value("constant", 0.0));
}

OptInstance instance_from_json(const nlohmann::json& j) {
  OptInstance inst;
  try {
    for (const auto& jv : j.at("variables")) {
      Variable v;
      v.name = jv.at("name").get<std::string>();
      v.length = jv.at("length").get<std::size_t>();
      v.is_vector = jv.at("vector").get<bool>();
      for (const auto& b : jv.at("lower")) v.lower.push_back(bound_from_json(b, -kInf));
      for (const auto& b : jv.at("upper")) v.upper.push_back(bound_from_json(b, kInf));
      inst.variables.push_back(std::move(v));
    }
    for (const auto& jt : j.at("objective")) {
      inst.objective.push_back({kind_from_string(jt.at("kind").get<std::string>()),
                                lin_expr_from_json(jt.at("inner")),
                                jt.at("weight").get<double>()});
    }
    for (const auto& jc : j.at("constraints")) {
      inst.constraints.push_back({lin_expr_from_json(jc.at("lhs")),
                                  relation_from_string(jc.at("relation").get<std::string>()),
                                  jc.at("rhs").get<double>(), jc.value("label", std::string())});
    }
    if (j.contains("metadata"))
      for (const auto& [k, v] : j.at("metadata").items()) inst.metadata[k] = v.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error("BadJson", std::string("malformed instance JSON: ") + e.what());
  }
  return inst;
}

}  // namespace ec::ir
