#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace worstpath {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

/// Strict full-string parses; nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view text);
std::optional<unsigned long long> parse_unsigned(std::string_view text);

}  // namespace worstpath
