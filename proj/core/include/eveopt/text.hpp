#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace eveopt::text {

/// Shortest-trailing-zero decimal with 17 significant digits ("%.17g"),
/// locale independent. Parsing the result yields the same double.
std::string format_double(double x);

std::optional<double> parse_double(std::string_view s);
std::optional<std::uint64_t> parse_uint(std::string_view s);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

}  // namespace eveopt::text
