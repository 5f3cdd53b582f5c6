#pragma once

#include <charconv>
#include <optional>
#include <string_view>
#include <system_error>

namespace seqzap::detail {

// Whole-token number parse. Unlike strtod, subnormals are not an error.
template <typename T>
std::optional<T> parse_number(std::string_view token) {
    T value{};
    const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || end != token.data() + token.size()) return std::nullopt;
    return value;
}

} // namespace seqzap::detail
