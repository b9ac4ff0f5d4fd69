#include "xppn/common.hpp"

#include <charconv>
#include <cmath>

namespace xppn {

std::string format_real(double v) {
    if (v == 0.0) v = 0.0; // normalize -0
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

} // namespace xppn
