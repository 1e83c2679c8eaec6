// io.hpp — deterministic text formatting shared by CSV and JSON emitters
#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace ptwalk {

// Round-trip-exact decimal form; infinities and NaN spelled "inf"/"nan".
inline std::string format_g17(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace ptwalk
