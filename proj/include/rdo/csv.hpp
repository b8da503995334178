#pragma once

#include <cstdio>
#include <string>

namespace rdo {

// Format a double so that parsing the string recovers the exact value
// (17 significant digits are sufficient for IEEE-754 binary64).
inline std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return std::string(buf);
}

}  // namespace rdo
