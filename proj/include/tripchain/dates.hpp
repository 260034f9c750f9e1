#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace tripchain {

using Date = std::chrono::sys_days;
using TimeOfDay = std::chrono::seconds;  // seconds after local midnight, [0, 86400]

inline constexpr TimeOfDay kEndOfDay{86400};

/// Parses YYYY-MM-DD. Returns nullopt on any malformed or out-of-range input.
std::optional<Date> parse_date(std::string_view s);

/// Parses HH:MM:SS. "24:00:00" is accepted as end of day.
std::optional<TimeOfDay> parse_time(std::string_view s);

std::string format_date(Date d);
std::string format_time(TimeOfDay t);

/// Closed calendar interval [first, last].
struct DateRange {
    Date first;
    Date last;

    bool contains(Date d) const noexcept { return first <= d && d <= last; }
    friend bool operator==(const DateRange&, const DateRange&) = default;
};

/// Parses "YYYY-MM-DD..YYYY-MM-DD".
std::optional<DateRange> parse_date_range(std::string_view s);
std::string format_date_range(const DateRange& r);

}  // namespace tripchain
