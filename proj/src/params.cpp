#include "ec/params.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ec/csv.hpp"

namespace ec::problems {

namespace {

std::string lower_alnum(std::string_view s) {
  std::string out;
  for (char c : s)
    if (std::isalnum(static_cast<unsigned char>(c)))
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

ParamSpec real(std::string name, std::string unit, std::string question, double lo, double hi,
               bool lo_open = false, bool hi_open = false) {
  ParamSpec s;
  s.name = std::move(name);
  s.type = ParamType::Real;
  s.unit = std::move(unit);
  s.question = std::move(question);
  s.min = lo;
  s.max = hi;
  s.min_open = lo_open;
  s.max_open = hi_open;
  return s;
}

ParamSpec with_default(ParamSpec s, ParamValue v, bool asked) {
  s.required = false;
  s.default_value = std::move(v);
  if (!asked) s.question.clear();
  return s;
}

ParamSpec vector_spec(std::string name, std::string unit, std::string question) {
  ParamSpec s = real(std::move(name), std::move(unit), std::move(question), 0.0, 1e6);
  s.type = ParamType::RealVector;
  return s;
}

ParamSpec enum_spec(std::string name, std::string question, std::vector<std::string> choices) {
  ParamSpec s;
  s.name = std::move(name);
  s.type = ParamType::Enum;
  s.question = std::move(question);
  s.choices = std::move(choices);
  return s;
}

ParamSchema make_schema(ProblemKind kind) {
  ParamSchema s{kind, {}};
  auto& p = s.params;
  switch (kind) {
    case ProblemKind::EvCharging: {
      p.push_back(real("charger_max_kw", "kW",
                       "What is the maximum power your charger can deliver (kW)?", 0.0, 1000.0,
                       true));
      p.push_back(real("energy_kwh", "kWh", "How much energy should the car receive (kWh)?", 0.0,
                       1000.0));
      p.push_back(enum_spec("location", "Where do you usually charge: home, work or public?",
                            {"home", "work", "public"}));
      ParamSpec t;
      t.name = "horizon_hours";
      t.type = ParamType::Integer;
      t.unit = "h";
      t.question = "How many hourly slots are available for charging (default 12)?";
      t.min = 1;
      t.max = 168;
      p.push_back(with_default(t, std::int64_t{12}, true));
      p.push_back(vector_spec("prices", "USD/kWh",
                              "What is the electricity price in each slot (USD/kWh, comma "
                              "separated; 0.14*4 repeats a value)?"));
      break;
    }
    case ProblemKind::HvacSetpoint: {
      ParamSpec band;
      band.name = "comfort_band";
      band.type = ParamType::Interval;
      band.unit = "degF";
      band.question = "Which indoor temperature range is comfortable for you (e.g. 65-75 F)?";
      band.min = -60.0;
      band.max = 140.0;
      p.push_back(band);
      p.push_back(real("occupancy_hours", "h/day", "How many hours per day is the home occupied?",
                       0.0, 24.0));
      p.push_back(real("efficiency", "COP",
                       "What is the efficiency (COP) of your heating/cooling system?", 0.0, 20.0,
                       true));
      p.push_back(real("ambient_temp", "degF", "What is the usual outdoor temperature (F)?", -80.0,
                       150.0));
      p.push_back(real("electricity_cost", "USD/kWh", "What do you pay for electricity (USD/kWh)?",
                       0.0, 10.0));
      break;
    }
    case ProblemKind::BatteryDispatch: {
      p.push_back(vector_spec("prices", "USD/kWh",
                              "What is the electricity price for each of the 24 hours (USD/kWh)?"));
      p.push_back(real("max_power_kw", "kW",
                       "What is the maximum charge/discharge power of the battery (kW)?", 0.0,
                       1e4));
      p.push_back(real("capacity_kwh", "kWh", "What is the usable battery capacity (kWh)?", 0.0,
                       1e5, true));
      p.push_back(vector_spec("solar", "kWh", "How much solar energy do you expect each hour (kWh)?"));
      p.push_back(vector_spec("demand", "kWh", "How much energy does the home use each hour (kWh)?"));
      ParamSpec ne = enum_spec("no_export", "", {"no", "yes"});
      p.push_back(with_default(ne, std::string("no"), false));
      break;
    }
    case ProblemKind::PvSizing: {
      p.push_back(enum_spec("location", "Where is the house located?", {}));
      p.push_back(real("roof_area_sqft", "sqft", "How much roof area is usable for panels (sq ft)?",
                       0.0, 1e6, true));
      p.push_back(real("monthly_consumption_kwh", "kWh",
                       "How much electricity does the home use per month (kWh)?", 0.0, 1e7));
      p.push_back(real("electricity_rate", "USD/kWh", "What do you pay for electricity (USD/kWh)?",
                       0.0, 10.0));
      p.push_back(real("budget", "USD", "What budget do you have for the installation (USD)?", 0.0,
                       1e9));
      p.push_back(with_default(real("panel_price_per_sqft", "USD/sqft", "x", 0.0, 1e4), 10.0, false));
      p.push_back(with_default(real("wattage_per_sqft", "W/sqft", "x", 0.0, 1e3, true), 15.0, false));
      p.push_back(
          with_default(real("capacity_factor", "", "x", 0.0, 1.0, true), 0.12, false));
      break;
    }
    case ProblemKind::HeatPump: {
      p.push_back(enum_spec("climate", "How would you describe your local climate?", {}));
      p.push_back(real("electricity_rate", "USD/kWh", "What do you pay for electricity (USD/kWh)?",
                       0.0, 10.0));
      p.push_back(real("ac_annual_kwh", "kWh",
                       "How much electricity does your current AC use per year (kWh)?", 0.0, 1e7));
      p.push_back(real("heat_pump_annual_kwh", "kWh",
                       "How much electricity would the heat pump use per year (kWh)?", 0.0, 1e7));
      p.push_back(with_default(
          real("maintenance_per_year", "USD",
               "What does heat pump maintenance cost per year (USD, default 200)?", 0.0, 1e6),
          200.0, true));
      break;
    }
    case ProblemKind::BatterySizing: {
      p.push_back(real("battery_unit_cost", "USD/kWh^2",
                       "How is the battery priced? Give the coefficient c in cost = c * size^2 "
                       "(USD/kWh^2).",
                       0.0, 1e9));
      p.push_back(real("efficiency", "", "What is the battery round-trip efficiency (0-1]?", 0.0,
                       1.0, true));
      p.push_back(real("solar_kwh_per_day", "kWh",
                       "How much solar energy can be stored per day (kWh)?", 0.0, 1e5));
      p.push_back(real("electricity_rate", "USD/kWh",
                       "What do you pay for grid electricity (USD/kWh)?", 0.0, 10.0));
      p.push_back(real("years", "years", "Over how many years should costs be compared?", 0.0,
                       100.0, true));
      p.push_back(
          with_default(real("evening_demand_kwh", "kWh", "x", 0.0, 1e5), 30.0, false));
      break;
    }
  }
  return s;
}

bool in_range(const ParamSpec& s, double v) {
  if (!std::isfinite(v)) return false;
  if (s.min_open ? !(v > s.min) : !(v >= s.min)) return false;
  if (s.max_open ? !(v < s.max) : !(v <= s.max)) return false;
  return true;
}

std::string range_text(const ParamSpec& s) {
  std::ostringstream os;
  os << (s.min_open ? "(" : "[") << s.min << ", " << s.max << (s.max_open ? ")" : "]");
  return os.str();
}

// Parses a number with an optional trailing unit ("15kw", "$0.13", "70 kWh").
std::optional<double> parse_number(std::string_view text) {
  std::string t = trim(text);
  std::erase(t, '$');
  std::erase(t, ',');
  if (t.empty()) return std::nullopt;
  double v = 0.0;
  const char* b = t.data();
  const char* e = t.data() + t.size();
  if (*b == '+') ++b;
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc()) return std::nullopt;
  std::string_view rest(ptr, static_cast<std::size_t>(e - ptr));
  rest = std::string_view(trim(rest)).empty() ? std::string_view{} : rest;
  // Unit suffix must be letters/symbols only; a second number means garbage.
  for (char c : rest)
    if (std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

[[noreturn]] void fail(const ParamSpec& s, const std::string& msg) {
  throw ValidationError(std::vector<FieldIssue>{{s.name, msg}});
}

std::optional<Interval> parse_interval(std::string_view text) {
  std::string t = trim(text);
  if (!t.empty() && (t.front() == '[' || t.front() == '(')) t.erase(0, 1);
  if (!t.empty() && (t.back() == ']' || t.back() == ')')) t.pop_back();
  for (const char* lead : {"between ", "from "})
    if (t.rfind(lead, 0) == 0) t = trim(std::string_view(t).substr(std::char_traits<char>::length(lead)));
  // Separators: ",", " to ", " and ", "-" (but not a leading minus sign).
  auto try_split = [&](std::size_t pos, std::size_t len) -> std::optional<Interval> {
    auto a = parse_number(std::string_view(t).substr(0, pos));
    auto b = parse_number(std::string_view(t).substr(pos + len));
    if (!a || !b) return std::nullopt;
    return Interval{*a, *b};
  };
  if (auto p = t.find(','); p != std::string::npos) return try_split(p, 1);
  if (auto p = t.find(" to "); p != std::string::npos) return try_split(p, 4);
  if (auto p = t.find(" and "); p != std::string::npos) return try_split(p, 5);
  for (std::size_t p = 1; p < t.size(); ++p)
    if (t[p] == '-')
      if (auto r = try_split(p, 1)) return r;
  return std::nullopt;
}

}  // namespace

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::EvCharging: return "ev_charging";
    case ProblemKind::HvacSetpoint: return "hvac";
    case ProblemKind::BatteryDispatch: return "battery_dispatch";
    case ProblemKind::PvSizing: return "pv_sizing";
    case ProblemKind::HeatPump: return "heat_pump";
    case ProblemKind::BatterySizing: return "battery_sizing";
  }
  return "unknown";
}

std::string title(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::EvCharging: return "EV charging";
    case ProblemKind::HvacSetpoint: return "HVAC setpoint";
    case ProblemKind::BatteryDispatch: return "Battery dispatch";
    case ProblemKind::PvSizing: return "PV sizing";
    case ProblemKind::HeatPump: return "Heat pump";
    case ProblemKind::BatterySizing: return "Battery sizing";
  }
  return "Unknown";
}

std::optional<ProblemKind> parse_kind(std::string_view text) {
  const std::string key = lower_alnum(text);
  static const std::pair<const char*, ProblemKind> kAliases[] = {
      {"evcharging", ProblemKind::EvCharging},     {"ev", ProblemKind::EvCharging},
      {"hvac", ProblemKind::HvacSetpoint},         {"hvacsetpoint", ProblemKind::HvacSetpoint},
      {"batterydispatch", ProblemKind::BatteryDispatch},
      {"dispatch", ProblemKind::BatteryDispatch},  {"pvsizing", ProblemKind::PvSizing},
      {"pv", ProblemKind::PvSizing},               {"solar", ProblemKind::PvSizing},
      {"heatpump", ProblemKind::HeatPump},         {"batterysizing", ProblemKind::BatterySizing},
  };
  for (const auto& [name, kind] : kAliases)
    if (key == name) return kind;
  return std::nullopt;
}

std::string to_string(ParamType t) {
  switch (t) {
    case ParamType::Real: return "real";
    case ParamType::Integer: return "integer";
    case ParamType::Interval: return "interval";
    case ParamType::Enum: return "enum";
    case ParamType::RealVector: return "real_vector";
  }
  return "unknown";
}

std::optional<std::string> ParamSpec::check(const ParamValue& v) const {
  switch (type) {
    case ParamType::Real: {
      const double* d = std::get_if<double>(&v);
      if (!d) return "expected a number";
      if (!in_range(*this, *d)) return "must lie in " + range_text(*this) + (unit.empty() ? "" : " " + unit);
      return std::nullopt;
    }
    case ParamType::Integer: {
      const auto* i = std::get_if<std::int64_t>(&v);
      if (!i) return "expected an integer";
      if (!in_range(*this, static_cast<double>(*i))) return "must lie in " + range_text(*this);
      return std::nullopt;
    }
    case ParamType::Interval: {
      const auto* iv = std::get_if<Interval>(&v);
      if (!iv) return "expected a range like 65-75";
      if (!in_range(*this, iv->lo) || !in_range(*this, iv->hi))
        return "endpoints must lie in " + range_text(*this);
      if (iv->lo > iv->hi) return "lower end exceeds upper end";
      return std::nullopt;
    }
    case ParamType::Enum: {
      const auto* s = std::get_if<std::string>(&v);
      if (!s) return "expected text";
      if (s->empty()) return "must not be empty";
      if (!choices.empty() && std::find(choices.begin(), choices.end(), *s) == choices.end()) {
        std::string opts;
        for (const auto& c : choices) opts += (opts.empty() ? "" : ", ") + c;
        return "must be one of: " + opts;
      }
      return std::nullopt;
    }
    case ParamType::RealVector: {
      const auto* vec = std::get_if<std::vector<double>>(&v);
      if (!vec) return "expected a list of numbers";
      if (vec->empty()) return "must contain at least one value";
      for (std::size_t i = 0; i < vec->size(); ++i)
        if (!in_range(*this, (*vec)[i]))
          return "entry " + std::to_string(i) + " must lie in " + range_text(*this);
      return std::nullopt;
    }
  }
  return "unknown type";
}

const ParamSpec* ParamSchema::find(std::string_view name) const {
  for (const auto& p : params)
    if (p.name == name) return &p;
  return nullptr;
}

std::vector<const ParamSpec*> ParamSchema::questions() const {
  std::vector<const ParamSpec*> out;
  for (const auto& p : params)
    if (p.asked()) out.push_back(&p);
  return out;
}

const ParamSchema& schema(ProblemKind kind) {
  static const std::vector<ParamSchema> all = [] {
    std::vector<ParamSchema> v;
    for (auto k : kAllKinds) v.push_back(make_schema(k));
    return v;
  }();
  return all.at(static_cast<std::size_t>(kind));
}

bool is_default_request(std::string_view text) {
  const std::string k = lower_alnum(text);
  return k == "default" || k == "skip" || k == "idontknow" || k == "dontknow" || k == "unknown" ||
         k == "notsure" || k == "usedefault";
}

ParamValue parse_answer(const ParamSpec& spec, std::string_view raw) {
  std::string text = trim(raw);
  // Accept "name = value" / "name: value" echoes of the parameter name.
  for (char sep : {'=', ':'}) {
    if (auto p = text.find(sep); p != std::string::npos &&
                                 lower_alnum(text.substr(0, p)) == lower_alnum(spec.name)) {
      text = trim(std::string_view(text).substr(p + 1));
      break;
    }
  }
  if (text.empty()) fail(spec, "no answer given");
  if (is_default_request(text)) {
    if (spec.default_value) return *spec.default_value;
    fail(spec, "a value is required");
  }

  ParamValue v;
  switch (spec.type) {
    case ParamType::Real: {
      auto d = parse_number(text);
      if (!d) fail(spec, "could not read a number from '" + text + "'");
      v = *d;
      break;
    }
    case ParamType::Integer: {
      auto d = parse_number(text);
      if (!d || std::floor(*d) != *d || std::abs(*d) > 9e15)
        fail(spec, "could not read a whole number from '" + text + "'");
      v = static_cast<std::int64_t>(*d);
      break;
    }
    case ParamType::Interval: {
      auto iv = parse_interval(text);
      if (!iv) fail(spec, "could not read a range from '" + text + "' (try 65-75)");
      v = *iv;
      break;
    }
    case ParamType::Enum: {
      std::string s = text;
      if (!spec.choices.empty()) {
        std::transform(s.begin(), s.end(), s.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        // Match a listed choice appearing as a word inside the answer.
        for (const auto& c : spec.choices)
          if (lower_alnum(s) == c || s.find(c) != std::string::npos) {
            s = c;
            break;
          }
      }
      v = s;
      break;
    }
    case ParamType::RealVector: {
      std::string body = text;
      if (!body.empty() && body.front() == '[') body.erase(0, 1);
      if (!body.empty() && body.back() == ']') body.pop_back();
      std::vector<double> out;
      const char sep = body.find(',') != std::string::npos ? ',' : ' ';
      for (const auto& item : split(body, sep)) {
        if (item.empty()) continue;
        std::size_t repeat = 1;
        std::string num = item;
        if (auto star = item.find_first_of("*x"); star != std::string::npos && star > 0) {
          auto r = parse_number(std::string_view(item).substr(star + 1));
          if (!r || *r < 1 || std::floor(*r) != *r || *r > 100000)
            fail(spec, "bad repeat count in '" + item + "'");
          repeat = static_cast<std::size_t>(*r);
          num = item.substr(0, star);
        }
        auto d = parse_number(num);
        if (!d) fail(spec, "could not read a number from '" + item + "'");
        out.insert(out.end(), repeat, *d);
      }
      v = std::move(out);
      break;
    }
  }
  if (auto err = spec.check(v)) fail(spec, *err);
  return v;
}

ElicitedParams ElicitedParams::make(ProblemKind kind, std::map<std::string, ParamValue> values) {
  const ParamSchema& s = schema(kind);
  std::vector<FieldIssue> issues;
  for (const auto& [name, v] : values)
    if (!s.find(name)) issues.push_back({name, "unknown parameter for " + to_string(kind)});
  for (const auto& spec : s.params) {
    auto it = values.find(spec.name);
    if (it == values.end()) {
      if (spec.default_value) {
        values.emplace(spec.name, *spec.default_value);
      } else {
        issues.push_back({spec.name, "missing"});
      }
      continue;
    }
    if (auto err = spec.check(it->second)) issues.push_back({spec.name, *err});
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return ElicitedParams(kind, std::move(values));
}

ElicitedParams ElicitedParams::unchecked(ProblemKind kind, std::map<std::string, ParamValue> values) {
  for (const auto& spec : schema(kind).params)
    if (!values.count(spec.name) && spec.default_value) values.emplace(spec.name, *spec.default_value);
  return ElicitedParams(kind, std::move(values));
}

namespace {
template <class T>
const T& get_as(const std::map<std::string, ParamValue>& m, const std::string& name) {
  auto it = m.find(name);
  if (it == m.end()) throw Error("MissingParameter", "parameter '" + name + "' is not set");
  const T* v = std::get_if<T>(&it->second);
  if (!v) throw Error("ParameterType", "parameter '" + name + "' has the wrong type");
  return *v;
}
}  // namespace

double ElicitedParams::real(const std::string& name) const {
  auto it = values_.find(name);
  if (it != values_.end())
    if (const auto* i = std::get_if<std::int64_t>(&it->second)) return static_cast<double>(*i);
  return get_as<double>(values_, name);
}
std::int64_t ElicitedParams::integer(const std::string& name) const {
  return get_as<std::int64_t>(values_, name);
}
Interval ElicitedParams::interval(const std::string& name) const {
  return get_as<Interval>(values_, name);
}
const std::string& ElicitedParams::text(const std::string& name) const {
  return get_as<std::string>(values_, name);
}
const std::vector<double>& ElicitedParams::vec(const std::string& name) const {
  return get_as<std::vector<double>>(values_, name);
}

ElicitedParams ElicitedParams::with(const std::string& name, ParamValue v) const {
  auto copy = values_;
  copy[name] = std::move(v);
  return make(kind_, std::move(copy));
}

nlohmann::ordered_json value_to_json(const ParamValue& v) {
  return std::visit(
      [](const auto& x) -> nlohmann::ordered_json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Interval>) {
          return nlohmann::ordered_json::array({x.lo, x.hi});
        } else {
          return x;
        }
      },
      v);
}

ParamValue value_from_json(const ParamSpec& spec, const nlohmann::json& j,
                           const std::filesystem::path& base_dir) {
  auto bad = [&](const std::string& msg) -> ParamValue { fail(spec, msg); };
  switch (spec.type) {
    case ParamType::Real:
      if (!j.is_number()) return bad("expected a number");
      return j.get<double>();
    case ParamType::Integer:
      if (j.is_number_integer()) return j.get<std::int64_t>();
      if (j.is_number() && std::floor(j.get<double>()) == j.get<double>())
        return static_cast<std::int64_t>(j.get<double>());
      return bad("expected an integer");
    case ParamType::Interval:
      if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return Interval{j[0].get<double>(), j[1].get<double>()};
      if (j.is_object() && j.contains("lo") && j.contains("hi"))
        return Interval{j.at("lo").get<double>(), j.at("hi").get<double>()};
      if (j.is_string()) return parse_answer(spec, j.get<std::string>());
      return bad("expected [lo, hi]");
    case ParamType::Enum:
      if (!j.is_string()) return bad("expected a string");
      return j.get<std::string>();
    case ParamType::RealVector: {
      if (j.is_object() && j.contains("csv")) {
        std::filesystem::path p = j.at("csv").get<std::string>();
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        return read_profile_csv(p);
      }
      if (j.is_string()) return parse_answer(spec, j.get<std::string>());
      if (!j.is_array()) return bad("expected an array of numbers");
      std::vector<double> out;
      for (const auto& e : j) {
        if (!e.is_number()) return bad("expected an array of numbers");
        out.push_back(e.get<double>());
      }
      return out;
    }
  }
  return bad("unknown type");
}

nlohmann::ordered_json to_json(const ElicitedParams& p) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& spec : schema(p.kind()).params) {
    auto it = p.values().find(spec.name);
    if (it != p.values().end()) j[spec.name] = value_to_json(it->second);
  }
  return j;
}

ElicitedParams params_from_json(ProblemKind kind, const nlohmann::json& j,
                                const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ValidationError(std::vector<FieldIssue>{{"params", "expected a JSON object"}});
  const ParamSchema& s = schema(kind);
  std::map<std::string, ParamValue> values;
  std::vector<FieldIssue> issues;
  for (const auto& [name, val] : j.items()) {
    const ParamSpec* spec = s.find(name);
    if (!spec) {
      issues.push_back({name, "unknown parameter for " + to_string(kind)});
      continue;
    }
    try {
      values[name] = value_from_json(*spec, val, base_dir);
    } catch (const ValidationError& e) {
      issues.insert(issues.end(), e.issues().begin(), e.issues().end());
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return ElicitedParams::make(kind, std::move(values));
}

nlohmann::ordered_json to_json(const ParamSchema& s) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(s.kind);
  j["title"] = title(s.kind);
  j["params"] = nlohmann::ordered_json::array();
  for (const auto& p : s.params) {
    nlohmann::ordered_json e;
    e["name"] = p.name;
    e["type"] = to_string(p.type);
    e["unit"] = p.unit;
    e["question"] = p.question.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(p.question);
    e["required"] = p.required;
    e["default"] = p.default_value ? value_to_json(*p.default_value) : nlohmann::ordered_json(nullptr);
    if (p.type != ParamType::Enum) {
      e["min"] = p.min;
      e["max"] = p.max;
      e["min_open"] = p.min_open;
      e["max_open"] = p.max_open;
    } else {
      e["choices"] = p.choices;
    }
    j["params"].push_back(std::move(e));
  }
  return j;
}

nlohmann::ordered_json all_schemas_json() {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (auto k : kAllKinds) j.push_back(to_json(schema(k)));
  return j;
}

}  // namespace ec::problems
