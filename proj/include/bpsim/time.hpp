#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace bpsim {

/// Timezone-naive instant with 1-second resolution (seconds since
/// 1970-01-01T00:00:00 wall clock).
using Timestamp = std::int64_t;

/// Durations are whole seconds once they are placed on the timeline.
using Seconds = std::int64_t;

inline constexpr Seconds kMinute = 60;
inline constexpr Seconds kHour = 3600;
inline constexpr Seconds kDay = 86400;
inline constexpr Seconds kWeek = 7 * kDay;

enum class Weekday : int { Monday = 0, Tuesday, Wednesday, Thursday, Friday, Saturday, Sunday };

/// Floor division that rounds toward negative infinity.
constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

constexpr std::int64_t floor_mod(std::int64_t a, std::int64_t b) { return a - floor_div(a, b) * b; }

/// Day number since the epoch (1970-01-01 is day 0).
constexpr std::int64_t day_index(Timestamp t) { return floor_div(t, kDay); }

constexpr Seconds seconds_of_day(Timestamp t) { return floor_mod(t, kDay); }

// 1970-01-05 was a Monday.
inline constexpr Timestamp kFirstMonday = 4 * kDay;

constexpr Weekday weekday_of(Timestamp t) {
    return static_cast<Weekday>(floor_mod(day_index(t) - 4, 7));
}

/// Offset from the most recent Monday 00:00:00, in [0, kWeek).
constexpr Seconds seconds_of_week(Timestamp t) { return floor_mod(t - kFirstMonday, kWeek); }

/// Monday 00:00:00 of the week containing t.
constexpr Timestamp week_start(Timestamp t) { return t - seconds_of_week(t); }

/// Parses "YYYY-MM-DD[T| ]HH:MM:SS[.fff][Z|+hh:mm|-hh:mm]". Fractions are
/// truncated and any zone designator is dropped.
Timestamp parse_timestamp(std::string_view text);

/// Formats as "YYYY-MM-DDTHH:MM:SS".
std::string format_timestamp(Timestamp t);

/// Parses "HH:MM:SS" (24:00:00 allowed) into seconds past midnight.
Seconds parse_time_of_day(std::string_view text);

std::string format_time_of_day(Seconds s);

std::string_view weekday_name(Weekday d);
Weekday parse_weekday(std::string_view name);

}  // namespace bpsim
