#pragma once

// Hourly profile files: a `t,value` header followed by one row per slot.

#include <filesystem>
#include <string_view>
#include <vector>

namespace ec::problems {

/// Throws ec::Error("BadCsv") on malformed input or non-consecutive t.
std::vector<double> parse_profile_csv(std::string_view text);
std::vector<double> read_profile_csv(const std::filesystem::path& path);
void write_profile_csv(const std::filesystem::path& path, const std::vector<double>& values);

}  // namespace ec::problems
