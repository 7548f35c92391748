#include "bpsim/time.hpp"

#include "bpsim/error.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cstdio>

namespace bpsim {

namespace {

int read_int(std::string_view text, std::size_t pos, std::size_t len, std::string_view whole) {
    if (pos + len > text.size()) throw ParseError("truncated timestamp '" + std::string(whole) + "'");
    int value = 0;
    auto first = text.data() + pos;
    auto [ptr, ec] = std::from_chars(first, first + len, value);
    if (ec != std::errc{} || ptr != first + len)
        throw ParseError("invalid timestamp '" + std::string(whole) + "'");
    return value;
}

void expect_char(std::string_view text, std::size_t pos, char c, std::string_view whole) {
    if (pos >= text.size() || text[pos] != c)
        throw ParseError("invalid timestamp '" + std::string(whole) + "'");
}

constexpr std::array<std::string_view, 7> kWeekdayNames{
    "Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday"};

}  // namespace

Timestamp parse_timestamp(std::string_view text) {
    std::string_view s = text;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);

    int y = read_int(s, 0, 4, text);
    expect_char(s, 4, '-', text);
    int mo = read_int(s, 5, 2, text);
    expect_char(s, 7, '-', text);
    int d = read_int(s, 8, 2, text);
    if (s.size() < 19 || (s[10] != 'T' && s[10] != ' '))
        throw ParseError("invalid timestamp '" + std::string(text) + "'");
    int h = read_int(s, 11, 2, text);
    expect_char(s, 13, ':', text);
    int mi = read_int(s, 14, 2, text);
    expect_char(s, 16, ':', text);
    int sec = read_int(s, 17, 2, text);

    std::size_t pos = 19;
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        std::size_t digits = 0;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos, ++digits;
        if (digits == 0) throw ParseError("invalid timestamp '" + std::string(text) + "'");
    }
    if (pos < s.size()) {
        if (s[pos] == 'Z' && pos + 1 == s.size()) {
            // dropped
        } else if ((s[pos] == '+' || s[pos] == '-') && (s.size() == pos + 6 || s.size() == pos + 5 || s.size() == pos + 3)) {
            read_int(s, pos + 1, 2, text);
        } else {
            throw ParseError("invalid timestamp '" + std::string(text) + "'");
        }
    }

    using namespace std::chrono;
    year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || sec > 60)
        throw ParseError("out-of-range timestamp '" + std::string(text) + "'");
    std::int64_t days = sys_days{ymd}.time_since_epoch().count();
    return days * kDay + h * kHour + mi * kMinute + sec;
}

std::string format_timestamp(Timestamp t) {
    using namespace std::chrono;
    const std::int64_t days = day_index(t);
    const Seconds sod = seconds_of_day(t);
    year_month_day ymd{sys_days{std::chrono::days{days}}};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(sod / kHour), static_cast<int>(sod % kHour / kMinute),
                  static_cast<int>(sod % kMinute));
    return buf;
}

Seconds parse_time_of_day(std::string_view text) {
    if (text.size() != 8 || text[2] != ':' || text[5] != ':')
        throw ParseError("invalid time of day '" + std::string(text) + "', expected HH:MM:SS");
    int h = read_int(text, 0, 2, text);
    int m = read_int(text, 3, 2, text);
    int s = read_int(text, 6, 2, text);
    if (m > 59 || s > 59 || h > 24 || (h == 24 && (m != 0 || s != 0)))
        throw ParseError("out-of-range time of day '" + std::string(text) + "'");
    return h * kHour + m * kMinute + s;
}

std::string format_time_of_day(Seconds s) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02d:%02d:%02d", static_cast<int>(s / kHour),
                  static_cast<int>(s % kHour / kMinute), static_cast<int>(s % kMinute));
    return buf;
}

std::string_view weekday_name(Weekday d) { return kWeekdayNames[static_cast<std::size_t>(d)]; }

Weekday parse_weekday(std::string_view name) {
    for (std::size_t i = 0; i < kWeekdayNames.size(); ++i) {
        auto ref = kWeekdayNames[i];
        if (ref.size() == name.size() &&
            std::equal(ref.begin(), ref.end(), name.begin(), [](char a, char b) {
                return std::tolower(static_cast<unsigned char>(a)) ==
                       std::tolower(static_cast<unsigned char>(b));
            }))
            return static_cast<Weekday>(i);
    }
    throw ParseError("unknown weekday '" + std::string(name) + "'");
}

}  // namespace bpsim
