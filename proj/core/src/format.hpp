#pragma once

#include <array>
#include <charconv>
#include <string>

namespace foxann {

// Shortest round-trip decimal form, so exported files are byte-stable and
// re-parse to the identical double.
inline std::string format_double(double value) {
    std::array<char, 32> buf;
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), end);
}

}  // namespace foxann
