#include "worstpath/format.hpp"

#include <charconv>

namespace worstpath {

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::optional<double> parse_double(std::string_view text) {
    double x = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) return std::nullopt;
    return x;
}

std::optional<unsigned long long> parse_unsigned(std::string_view text) {
    unsigned long long x = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) return std::nullopt;
    return x;
}

}  // namespace worstpath
