#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>

namespace bimo {

// Shortest decimal form that parses back to the same double: clean to read,
// exact, and byte-stable, which is what the reproducibility guarantees rest on.
inline std::string format_real(double v) {
    if (v == 0.0) v = 0.0; // print negative zero as plain 0
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

} // namespace bimo
