#pragma once

// Problem kinds, their parameter schemas and validated parameter sets.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "ec/error.hpp"

namespace ec::problems {

enum class ProblemKind { EvCharging, HvacSetpoint, BatteryDispatch, PvSizing, HeatPump, BatterySizing };

inline constexpr ProblemKind kAllKinds[] = {
    ProblemKind::EvCharging, ProblemKind::HvacSetpoint, ProblemKind::BatteryDispatch,
    ProblemKind::PvSizing,   ProblemKind::HeatPump,     ProblemKind::BatterySizing};

/// Canonical snake_case name, e.g. "battery_sizing".
std::string to_string(ProblemKind kind);
/// Human readable title, e.g. "Battery sizing".
std::string title(ProblemKind kind);
/// Accepts canonical names and loose spellings ("batterysizing", "EV-Charging").
std::optional<ProblemKind> parse_kind(std::string_view text);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  friend bool operator==(const Interval&, const Interval&) = default;
};

using ParamValue = std::variant<double, std::int64_t, Interval, std::string, std::vector<double>>;

enum class ParamType { Real, Integer, Interval, Enum, RealVector };

std::string to_string(ParamType t);

struct ParamSpec {
  std::string name;
  ParamType type = ParamType::Real;
  std::string unit;
  /// Empty for parameters that are never asked (schema defaults only).
  std::string question;
  bool required = true;
  std::optional<ParamValue> default_value;
  // Physical range, applied to scalars, interval endpoints and vector entries.
  double min = -1e300;
  double max = 1e300;
  bool min_open = false;
  bool max_open = false;
  /// Allowed values for Enum; empty means free text.
  std::vector<std::string> choices;

  bool asked() const { return !question.empty(); }
  /// Error message when `v` is out of range or of the wrong type.
  std::optional<std::string> check(const ParamValue& v) const;
};

struct ParamSchema {
  ProblemKind kind;
  std::vector<ParamSpec> params;

  const ParamSpec* find(std::string_view name) const;
  std::vector<const ParamSpec*> questions() const;
};

const ParamSchema& schema(ProblemKind kind);

/// Parses a free-text answer for one parameter ("15kw", "65-75",
/// "efficiency = 0.9", "0.14*4, 0.06*8"). Throws ValidationError.
ParamValue parse_answer(const ParamSpec& spec, std::string_view text);

/// True when the answer asks for the schema default ("default", "skip",
/// "I don't know").
bool is_default_request(std::string_view text);

/// Builder-level parameter failure (DimensionMismatch, InfeasibleSpec,
/// NegativeInput, BadBounds) naming the fields involved.
class ParamError : public Error {
 public:
  ParamError(std::string code, const std::string& message, std::vector<std::string> fields)
      : Error(std::move(code), message), fields_(std::move(fields)) {}
  const std::vector<std::string>& fields() const noexcept { return fields_; }

 private:
  std::vector<std::string> fields_;
};

/// A complete, range-checked parameter set for one problem kind.
class ElicitedParams {
 public:
  /// Validates presence and ranges, fills schema defaults. Throws ValidationError.
  static ElicitedParams make(ProblemKind kind, std::map<std::string, ParamValue> values);
  /// Skips validation; only for exercising builder-level error paths.
  static ElicitedParams unchecked(ProblemKind kind, std::map<std::string, ParamValue> values);

  ProblemKind kind() const noexcept { return kind_; }
  const std::map<std::string, ParamValue>& values() const noexcept { return values_; }
  bool has(const std::string& name) const { return values_.count(name) > 0; }

  double real(const std::string& name) const;
  std::int64_t integer(const std::string& name) const;
  Interval interval(const std::string& name) const;
  const std::string& text(const std::string& name) const;
  const std::vector<double>& vec(const std::string& name) const;

  ElicitedParams with(const std::string& name, ParamValue v) const;

 private:
  ElicitedParams(ProblemKind kind, std::map<std::string, ParamValue> values)
      : kind_(kind), values_(std::move(values)) {}

  ProblemKind kind_;
  std::map<std::string, ParamValue> values_;
};

nlohmann::ordered_json value_to_json(const ParamValue& v);
/// Parses one value per its spec. Vectors may be given as {"csv": "path"},
/// resolved against `base_dir`.
ParamValue value_from_json(const ParamSpec& spec, const nlohmann::json& j,
                           const std::filesystem::path& base_dir = {});

/// Values in schema order.
nlohmann::ordered_json to_json(const ElicitedParams& p);
ElicitedParams params_from_json(ProblemKind kind, const nlohmann::json& j,
                                const std::filesystem::path& base_dir = {});
nlohmann::ordered_json to_json(const ParamSchema& s);
nlohmann::ordered_json all_schemas_json();

}  // namespace ec::problems
