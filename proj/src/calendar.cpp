#include "emoidx/calendar.hpp"

#include <charconv>
#include <cstdio>

#include "emoidx/error.hpp"

namespace emoidx {

namespace {

int parse_digits(std::string_view text, std::size_t pos, std::size_t n, std::string_view what) {
    if (pos + n > text.size()) {
        throw DataError("truncated " + std::string(what) + ": '" + std::string(text) + "'");
    }
    int value = 0;
    for (std::size_t i = pos; i < pos + n; ++i) {
        const char c = text[i];
        if (c < '0' || c > '9') {
            throw DataError("invalid " + std::string(what) + ": '" + std::string(text) + "'");
        }
        value = value * 10 + (c - '0');
    }
    return value;
}

void expect_char(std::string_view text, std::size_t pos, char c, std::string_view what) {
    if (pos >= text.size() || text[pos] != c) {
        throw DataError("invalid " + std::string(what) + ": '" + std::string(text) + "'");
    }
}

Day make_day(int y, int m, int d, std::string_view text) {
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) {
        throw DataError("invalid calendar date: '" + std::string(text) + "'");
    }
    return Day{ymd};
}

} // namespace

Day parse_date(std::string_view text) {
    if (text.size() != 10) {
        throw DataError("invalid date: '" + std::string(text) + "'");
    }
    const int y = parse_digits(text, 0, 4, "date");
    expect_char(text, 4, '-', "date");
    const int m = parse_digits(text, 5, 2, "date");
    expect_char(text, 7, '-', "date");
    const int d = parse_digits(text, 8, 2, "date");
    return make_day(y, m, d, text);
}

std::string format_date(Day day) {
    const std::chrono::year_month_day ymd{day};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

Instant parse_rfc3339(std::string_view text) {
    constexpr std::string_view what = "timestamp";
    if (text.size() < 20) {
        throw DataError("invalid timestamp: '" + std::string(text) + "'");
    }
    const Day day = parse_date(text.substr(0, 10));
    if (text[10] != 'T' && text[10] != 't' && text[10] != ' ') {
        throw DataError("invalid timestamp: '" + std::string(text) + "'");
    }
    const int hh = parse_digits(text, 11, 2, what);
    expect_char(text, 13, ':', what);
    const int mm = parse_digits(text, 14, 2, what);
    expect_char(text, 16, ':', what);
    const int ss = parse_digits(text, 17, 2, what);
    // 60 is tolerated as a leap second and folded into the next minute.
    if (hh > 23 || mm > 59 || ss > 60) {
        throw DataError("invalid time of day: '" + std::string(text) + "'");
    }
    std::size_t pos = 19;
    long millis = 0;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        const std::size_t start = pos;
        long scale = 100;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
            millis += (text[pos] - '0') * scale;
            scale /= 10;
            ++pos;
        }
        if (pos == start) {
            throw DataError("invalid fractional seconds: '" + std::string(text) + "'");
        }
    }
    if (pos >= text.size()) {
        throw DataError("timestamp lacks a UTC offset: '" + std::string(text) + "'");
    }
    long offset_minutes = 0;
    if (text[pos] == 'Z' || text[pos] == 'z') {
        ++pos;
    } else if (text[pos] == '+' || text[pos] == '-') {
        const int sign = text[pos] == '+' ? 1 : -1;
        const int oh = parse_digits(text, pos + 1, 2, what);
        expect_char(text, pos + 3, ':', what);
        const int om = parse_digits(text, pos + 4, 2, what);
        if (oh > 23 || om > 59) {
            throw DataError("invalid UTC offset: '" + std::string(text) + "'");
        }
        offset_minutes = sign * (oh * 60 + om);
        pos += 6;
    } else {
        throw DataError("invalid UTC offset: '" + std::string(text) + "'");
    }
    if (pos != text.size()) {
        throw DataError("trailing characters in timestamp: '" + std::string(text) + "'");
    }
    using namespace std::chrono;
    const auto local = Instant{day} + hours{hh} + minutes{mm} + seconds{ss} + milliseconds{millis};
    return local - minutes{offset_minutes};
}

std::string format_rfc3339(Instant t, int offset_minutes) {
    using namespace std::chrono;
    const auto local = t + minutes{offset_minutes};
    const Day day = floor<days>(local);
    const hh_mm_ss<milliseconds> tod{local - day};
    char buf[48];
    const std::string date = format_date(day);
    if (offset_minutes == 0) {
        std::snprintf(buf, sizeof buf, "%sT%02ld:%02ld:%02ldZ", date.c_str(), static_cast<long>(tod.hours().count()),
                      static_cast<long>(tod.minutes().count()), static_cast<long>(tod.seconds().count()));
    } else {
        const int a = offset_minutes < 0 ? -offset_minutes : offset_minutes;
        std::snprintf(buf, sizeof buf, "%sT%02ld:%02ld:%02ld%c%02d:%02d", date.c_str(),
                      static_cast<long>(tod.hours().count()), static_cast<long>(tod.minutes().count()),
                      static_cast<long>(tod.seconds().count()), offset_minutes < 0 ? '-' : '+', a / 60, a % 60);
    }
    return buf;
}

int weekday_index(Day day) {
    // iso_encoding: Monday = 1 ... Sunday = 7
    return static_cast<int>(std::chrono::weekday{day}.iso_encoding()) - 1;
}

Period parse_period(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw DataError("period must be FIRST:LAST, got '" + std::string(text) + "'");
    }
    Period p{parse_date(text.substr(0, colon)), parse_date(text.substr(colon + 1))};
    if (p.last < p.first) {
        throw DataError("period end precedes start: '" + std::string(text) + "'");
    }
    return p;
}

} // namespace emoidx
