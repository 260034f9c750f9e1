#include "tripchain/dates.hpp"

#include <charconv>

#include <fmt/format.h>

namespace tripchain {
namespace {

bool parse_fixed(std::string_view s, int& out) {
    if (s.empty()) return false;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
    }
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

std::optional<Date> parse_date(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    int y = 0, m = 0, d = 0;
    if (!parse_fixed(s.substr(0, 4), y) || !parse_fixed(s.substr(5, 2), m) ||
        !parse_fixed(s.substr(8, 2), d)) {
        return std::nullopt;
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{unsigned(m)},
                                          std::chrono::day{unsigned(d)}};
    if (!ymd.ok()) return std::nullopt;
    return Date{ymd};
}

std::optional<TimeOfDay> parse_time(std::string_view s) {
    if (s.size() != 8 || s[2] != ':' || s[5] != ':') return std::nullopt;
    int h = 0, m = 0, sec = 0;
    if (!parse_fixed(s.substr(0, 2), h) || !parse_fixed(s.substr(3, 2), m) ||
        !parse_fixed(s.substr(6, 2), sec)) {
        return std::nullopt;
    }
    if (h == 24 && m == 0 && sec == 0) return kEndOfDay;
    if (h > 23 || m > 59 || sec > 59) return std::nullopt;
    return TimeOfDay{h * 3600 + m * 60 + sec};
}

std::string format_date(Date d) {
    const std::chrono::year_month_day ymd{d};
    return fmt::format("{:04d}-{:02d}-{:02d}", int(ymd.year()), unsigned(ymd.month()),
                       unsigned(ymd.day()));
}

std::string format_time(TimeOfDay t) {
    const auto s = t.count();
    return fmt::format("{:02d}:{:02d}:{:02d}", s / 3600, (s / 60) % 60, s % 60);
}

std::optional<DateRange> parse_date_range(std::string_view s) {
    const auto sep = s.find("..");
    if (sep == std::string_view::npos) return std::nullopt;
    auto a = parse_date(s.substr(0, sep));
    auto b = parse_date(s.substr(sep + 2));
    if (!a || !b || *b < *a) return std::nullopt;
    return DateRange{*a, *b};
}

std::string format_date_range(const DateRange& r) {
    return format_date(r.first) + ".." + format_date(r.last);
}

}  // namespace tripchain
