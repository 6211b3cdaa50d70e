#include "seatrend/csvio.hpp"

#include <charconv>

namespace seatrend {

std::string csv_num(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string csv_num(long long v) { return std::to_string(v); }

} // namespace seatrend
