#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace homeguard {

// Fixed-point decimal rendering ('.' separator, no locale). All numeric values
// that end up in chain bodies or CSV rows go through this so that dumps are
// byte-stable across runs.
inline std::string format_fixed(double value, int decimals = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
    return buf;
}

inline double parse_double(const std::string& text) {
    std::size_t pos = 0;
    double v = std::stod(text, &pos);
    if (pos != text.size())
        throw std::invalid_argument("not a number: \"" + text + "\"");
    return v;
}

inline bool is_hex64(const std::string& s) {
    if (s.size() != 64) return false;
    for (char c : s)
        if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
    return true;
}

}  // namespace homeguard
