#include "ec/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "ec/error.hpp"

namespace ec::problems {

namespace {

std::string strip(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
  std::size_t b = 0;
  while (b < s.size() && (s[b] == ' ' || s[b] == '\t')) ++b;
  return s.substr(b);
}

double to_double(const std::string& s, std::size_t line) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
    throw Error("BadCsv", "line " + std::to_string(line) + ": not a number: '" + s + "'");
  return v;
}

}  // namespace

std::vector<double> parse_profile_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  std::vector<double> out;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip(line);
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "t,value") throw Error("BadCsv", "expected header 't,value'");
      header = true;
      continue;
    }
    auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
      throw Error("BadCsv", "line " + std::to_string(lineno) + ": expected two columns");
    const double t = to_double(strip(line.substr(0, comma)), lineno);
    if (t != static_cast<double>(out.size()))
      throw Error("BadCsv", "line " + std::to_string(lineno) + ": expected t=" +
                                std::to_string(out.size()));
    out.push_back(to_double(strip(line.substr(comma + 1)), lineno));
  }
  if (!header) throw Error("BadCsv", "empty profile");
  return out;
}

std::vector<double> read_profile_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error("BadCsv", "cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_profile_csv(ss.str());
}

void write_profile_csv(const std::filesystem::path& path, const std::vector<double>& values) {
  std::ofstream f(path);
  if (!f) throw Error("BadCsv", "cannot write " + path.string());
  f << "t,value\n";
  char buf[64];
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", values[i]);
    f << i << ',' << buf << '\n';
  }
}

}  // namespace ec::problems
