#include "carima/date.hpp"

#include "carima/error.hpp"

#include <charconv>
#include <cstdio>

namespace carima {

bool Date::try_parse(std::string_view iso, Date& out) noexcept {
    // Strict YYYY-MM-DD
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') {
        return false;
    }
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    auto parse_field = [](std::string_view field, auto& value) {
        for (char c : field) {
            if (c < '0' || c > '9') return false;
        }
        auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
        return ec == std::errc() && ptr == field.data() + field.size();
    };
    if (!parse_field(iso.substr(0, 4), y) || !parse_field(iso.substr(5, 2), m) ||
        !parse_field(iso.substr(8, 2), d)) {
        return false;
    }
    const std::chrono::year_month_day ymd{std::chrono::year(y), std::chrono::month(m),
                                          std::chrono::day(d)};
    if (!ymd.ok()) {
        return false;
    }
    out = Date(std::chrono::sys_days(ymd));
    return true;
}

Date Date::parse(std::string_view iso) {
    Date out;
    if (!try_parse(iso, out)) {
        throw Error(ErrorCode::InvalidArgument,
                    "not an ISO-8601 calendar date: '" + std::string(iso) + "'");
    }
    return out;
}

std::string Date::to_string() const {
    const std::chrono::year_month_day ymd{days_};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

}  // namespace carima
