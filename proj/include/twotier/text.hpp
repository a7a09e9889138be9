#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace twotier::text {

/// Shortest decimal text that parses back to the identical double.
std::string format_double(double value);

/// Fixed-point formatting with the given number of decimals.
std::string format_fixed(double value, int decimals);

/// Strict parse of a whole field; std::nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view field);
std::optional<long long> parse_int(std::string_view field);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

}  // namespace twotier::text
