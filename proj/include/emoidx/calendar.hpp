#pragma once

#include <chrono>
#include <map>
#include <string>
#include <string_view>

namespace emoidx {

using Day = std::chrono::sys_days;
using Instant = std::chrono::sys_time<std::chrono::milliseconds>;

// Day-indexed real series; absent keys are gaps.
using DayValues = std::map<Day, double>;

// Parses YYYY-MM-DD. Throws DataError.
Day parse_date(std::string_view text);
std::string format_date(Day day);

// RFC 3339 timestamp, e.g. 2024-01-01T09:30:00+09:00 or ...Z, optional fraction.
Instant parse_rfc3339(std::string_view text);
// Formats with an explicit UTC offset in minutes.
std::string format_rfc3339(Instant t, int offset_minutes = 0);

// Monday = 0 ... Sunday = 6.
int weekday_index(Day day);

// Days since 1970-01-01.
inline long day_number(Day day) { return day.time_since_epoch().count(); }

inline Day add_days(Day day, long n) { return day + std::chrono::days{n}; }

// Inclusive "A:B" period.
struct Period {
    Day first;
    Day last;
};
Period parse_period(std::string_view text);

} // namespace emoidx
