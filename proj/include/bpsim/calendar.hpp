#pragma once

#include "bpsim/event.hpp"
#include "bpsim/time.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace bpsim {

/// A weekday-bound wall-clock interval [begin, end). end may be 24:00:00.
struct CalendarEntry {
    Weekday weekday = Weekday::Monday;
    Seconds begin = 0;
    Seconds end = 0;

    auto operator<=>(const CalendarEntry&) const = default;
};

/// Set of weekly availability intervals with 1-second resolution.
///
/// Stored canonically as sorted, merged half-open intervals over the week
/// [0, kWeek) measured from Monday 00:00:00. Adjacent entries (including a
/// day's 24:00:00 end touching the next day's 00:00:00 begin) merge.
class WeeklyCalendar {
public:
    struct Interval {
        Seconds begin = 0;
        Seconds end = 0;
        friend bool operator==(const Interval&, const Interval&) = default;
    };

    WeeklyCalendar() = default;
    explicit WeeklyCalendar(std::span<const CalendarEntry> entries);
    WeeklyCalendar(std::initializer_list<CalendarEntry> entries)
        : WeeklyCalendar(std::span<const CalendarEntry>(entries.begin(), entries.size())) {}

    /// Available every second of the week.
    static WeeklyCalendar always();
    /// Same hours [begin, end) on each listed weekday.
    static WeeklyCalendar daily(std::span<const Weekday> days, Seconds begin, Seconds end);
    static WeeklyCalendar weekdays(Seconds begin, Seconds end);

    void add(const CalendarEntry& entry);

    bool empty() const { return intervals_.empty(); }
    const std::vector<Interval>& intervals() const { return intervals_; }
    Seconds weekly_seconds() const { return weekly_seconds_; }

    /// Entries split at day boundaries, ordered by weekday then begin.
    std::vector<CalendarEntry> entries() const;

    /// t inside [begin, end) of some interval.
    bool contains(Timestamp t) const;
    /// The entry's whole interval lies inside the calendar.
    bool covers(const CalendarEntry& entry) const;

    /// In-calendar seconds between Monday 00:00:00 of the week containing t
    /// and t (exclusive).
    Seconds elapsed_in_week(Seconds second_of_week) const;

    friend bool operator==(const WeeklyCalendar& a, const WeeklyCalendar& b) {
        return a.intervals_ == b.intervals_;
    }

private:
    void insert(Seconds begin, Seconds end);

    std::vector<Interval> intervals_;
    Seconds weekly_seconds_ = 0;
};

/// Granule [k*n, (k+1)*n) minutes of t's weekday that contains t.
CalendarEntry granule_of(Timestamp t, int granule_minutes);

/// Throws UsageError unless 0 < n and n divides 1440.
void check_granule(int granule_minutes);

struct CandidateObservation {
    std::string activity;
    std::int64_t day = 0;  // day_index of the timestamp
    CalendarEntry granule;
};

/// Multiset of granule-aligned calendar entry candidates. Observations keep
/// the activity and calendar date behind each unit of multiplicity.
struct CandidateMultiset {
    int granule_minutes = 60;
    std::map<CalendarEntry, std::int64_t> multiplicity;
    std::vector<CandidateObservation> observations;

    void add(const std::string& activity, Timestamp t);
    void merge(const CandidateMultiset& other);
    std::int64_t total() const;
    bool empty() const { return multiplicity.empty(); }
};

/// Start and completion of every event each contribute one candidate.
CandidateMultiset extract_candidates(std::span<const Event* const> events, int granule_minutes);
CandidateMultiset extract_candidates(std::span<const Event> events, int granule_minutes);
/// One candidate per timestamp, tagged with `activity`.
CandidateMultiset extract_candidates(std::span<const Timestamp> stamps, int granule_minutes,
                                     const std::string& activity);

/// Smallest t' >= t inside the calendar. Throws ValidationError on an empty
/// calendar.
Timestamp next_available(const WeeklyCalendar& cal, Timestamp t);

/// Seconds of [t1, t2] that fall inside the calendar.
Seconds in_calendar_duration(const WeeklyCalendar& cal, Timestamp t1, Timestamp t2);

/// Instant at which `ideal` in-calendar seconds have elapsed after start.
Timestamp idle_processing_completion(const WeeklyCalendar& cal, Timestamp start, Seconds ideal);

}  // namespace bpsim
