#include "bpsim/calendar.hpp"

#include "bpsim/error.hpp"

#include <algorithm>

namespace bpsim {

namespace {

// In-calendar seconds from the epoch-aligned Monday to t.
Seconds cumulative(const WeeklyCalendar& cal, Timestamp t) {
    const std::int64_t week = floor_div(t - kFirstMonday, kWeek);
    return week * cal.weekly_seconds() + cal.elapsed_in_week(seconds_of_week(t));
}

}  // namespace

WeeklyCalendar::WeeklyCalendar(std::span<const CalendarEntry> entries) {
    for (const auto& e : entries) add(e);
}

WeeklyCalendar WeeklyCalendar::always() {
    WeeklyCalendar cal;
    cal.insert(0, kWeek);
    return cal;
}

WeeklyCalendar WeeklyCalendar::daily(std::span<const Weekday> days, Seconds begin, Seconds end) {
    WeeklyCalendar cal;
    for (Weekday d : days) cal.add({d, begin, end});
    return cal;
}

WeeklyCalendar WeeklyCalendar::weekdays(Seconds begin, Seconds end) {
    constexpr Weekday days[] = {Weekday::Monday, Weekday::Tuesday, Weekday::Wednesday, Weekday::Thursday,
                                Weekday::Friday};
    return daily(days, begin, end);
}

void WeeklyCalendar::add(const CalendarEntry& entry) {
    if (entry.begin < 0 || entry.end > kDay || entry.begin >= entry.end)
        throw ValidationError("calendar entry " + std::string(weekday_name(entry.weekday)) + " " +
                              format_time_of_day(entry.begin) + "-" + format_time_of_day(entry.end) +
                              " requires beginTime < endTime within one day");
    const Seconds offset = static_cast<Seconds>(entry.weekday) * kDay;
    insert(offset + entry.begin, offset + entry.end);
}

void WeeklyCalendar::insert(Seconds begin, Seconds end) {
    intervals_.push_back({begin, end});
    std::sort(intervals_.begin(), intervals_.end(),
              [](const Interval& a, const Interval& b) { return a.begin < b.begin; });
    std::vector<Interval> merged;
    for (const auto& iv : intervals_) {
        if (!merged.empty() && iv.begin <= merged.back().end)
            merged.back().end = std::max(merged.back().end, iv.end);
        else
            merged.push_back(iv);
    }
    intervals_ = std::move(merged);
    weekly_seconds_ = 0;
    for (const auto& iv : intervals_) weekly_seconds_ += iv.end - iv.begin;
}

std::vector<CalendarEntry> WeeklyCalendar::entries() const {
    std::vector<CalendarEntry> out;
    for (const auto& iv : intervals_) {
        Seconds b = iv.begin;
        while (b < iv.end) {
            const std::int64_t day = b / kDay;
            const Seconds day_end = std::min(iv.end, (day + 1) * kDay);
            out.push_back({static_cast<Weekday>(day), b - day * kDay, day_end - day * kDay});
            b = day_end;
        }
    }
    return out;
}

bool WeeklyCalendar::contains(Timestamp t) const {
    const Seconds s = seconds_of_week(t);
    auto it = std::upper_bound(intervals_.begin(), intervals_.end(), s,
                               [](Seconds v, const Interval& iv) { return v < iv.begin; });
    if (it == intervals_.begin()) return false;
    --it;
    return s < it->end;
}

bool WeeklyCalendar::covers(const CalendarEntry& entry) const {
    const Seconds b = static_cast<Seconds>(entry.weekday) * kDay + entry.begin;
    const Seconds e = static_cast<Seconds>(entry.weekday) * kDay + entry.end;
    return std::any_of(intervals_.begin(), intervals_.end(),
                       [&](const Interval& iv) { return iv.begin <= b && e <= iv.end; });
}

Seconds WeeklyCalendar::elapsed_in_week(Seconds second_of_week) const {
    Seconds acc = 0;
    for (const auto& iv : intervals_) {
        if (second_of_week <= iv.begin) break;
        acc += std::min(second_of_week, iv.end) - iv.begin;
    }
    return acc;
}

void check_granule(int granule_minutes) {
    if (granule_minutes <= 0 || 1440 % granule_minutes != 0)
        throw UsageError("granule size " + std::to_string(granule_minutes) + " min does not divide 1440");
}

CalendarEntry granule_of(Timestamp t, int granule_minutes) {
    check_granule(granule_minutes);
    const Seconds width = static_cast<Seconds>(granule_minutes) * kMinute;
    const Seconds k = seconds_of_day(t) / width;
    return {weekday_of(t), k * width, (k + 1) * width};
}

void CandidateMultiset::add(const std::string& activity, Timestamp t) {
    const CalendarEntry g = granule_of(t, granule_minutes);
    ++multiplicity[g];
    observations.push_back({activity, day_index(t), g});
}

void CandidateMultiset::merge(const CandidateMultiset& other) {
    for (const auto& [k, m] : other.multiplicity) multiplicity[k] += m;
    observations.insert(observations.end(), other.observations.begin(), other.observations.end());
}

std::int64_t CandidateMultiset::total() const {
    std::int64_t sum = 0;
    for (const auto& [k, m] : multiplicity) sum += m;
    return sum;
}

CandidateMultiset extract_candidates(std::span<const Event* const> events, int granule_minutes) {
    check_granule(granule_minutes);
    CandidateMultiset out;
    out.granule_minutes = granule_minutes;
    for (const Event* e : events) {
        out.add(e->activity, e->start);
        out.add(e->activity, e->complete);
    }
    return out;
}

CandidateMultiset extract_candidates(std::span<const Event> events, int granule_minutes) {
    std::vector<const Event*> ptrs;
    ptrs.reserve(events.size());
    for (const auto& e : events) ptrs.push_back(&e);
    return extract_candidates(ptrs, granule_minutes);
}

CandidateMultiset extract_candidates(std::span<const Timestamp> stamps, int granule_minutes,
                                     const std::string& activity) {
    check_granule(granule_minutes);
    CandidateMultiset out;
    out.granule_minutes = granule_minutes;
    for (Timestamp t : stamps) out.add(activity, t);
    return out;
}

Timestamp next_available(const WeeklyCalendar& cal, Timestamp t) {
    if (cal.empty()) throw ValidationError("calendar has no availability");
    const Seconds s = seconds_of_week(t);
    const Timestamp base = t - s;
    for (const auto& iv : cal.intervals()) {
        if (s < iv.end) return iv.begin <= s ? t : base + iv.begin;
    }
    return base + kWeek + cal.intervals().front().begin;
}

Seconds in_calendar_duration(const WeeklyCalendar& cal, Timestamp t1, Timestamp t2) {
    if (t1 > t2) throw UsageError("in_calendar_duration requires t1 <= t2");
    if (cal.empty()) return 0;
    return cumulative(cal, t2) - cumulative(cal, t1);
}

Timestamp idle_processing_completion(const WeeklyCalendar& cal, Timestamp start, Seconds ideal) {
    if (cal.empty()) throw ValidationError("calendar has no availability");
    if (ideal < 0) throw UsageError("ideal processing time must be >= 0");
    if (ideal == 0) return start;

    const Seconds target = cumulative(cal, start) + ideal;
    const Seconds per_week = cal.weekly_seconds();
    std::int64_t week = floor_div(target, per_week);
    Seconds remaining = target - week * per_week;
    if (remaining == 0) {
        // Work ends at the close of the previous week's last interval.
        --week;
        remaining = per_week;
    }
    const Timestamp base = kFirstMonday + week * kWeek;
    for (const auto& iv : cal.intervals()) {
        const Seconds len = iv.end - iv.begin;
        if (remaining <= len) return base + iv.begin + remaining;
        remaining -= len;
    }
    return base + cal.intervals().back().end;  // unreachable: remaining <= per_week
}

}  // namespace bpsim
