#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace irrspec {

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// Whole-string numeric parses; nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view text);
std::optional<std::int64_t> parse_int64(std::string_view text);

std::string_view trim(std::string_view text);

/// Splits one CSV record on commas. Quoting is not supported.
std::vector<std::string_view> split_fields(std::string_view line);

}  // namespace irrspec
