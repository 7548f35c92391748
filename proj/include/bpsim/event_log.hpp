#pragma once

#include "bpsim/calendar.hpp"
#include "bpsim/event.hpp"

#include <json.hpp>

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bpsim {

struct ReadLogResult {
    EventLog log;
    std::size_t rejected_rows = 0;
    std::vector<std::string> warnings;
};

/// Reads the CSV log schema: case_id, activity, resource, start_time and
/// end_time are required; enable_time is optional. Rows whose timestamps
/// are out of order (end before start, or enable after start) are dropped
/// and counted. Traces keep first-appearance order; events inside a trace
/// are stably sorted by start, then end.
ReadLogResult read_log(std::string_view csv);

/// Writes case_id,activity,resource,enable_time,start_time,end_time with an
/// empty enable_time field where enablement is unknown.
std::string write_log(const EventLog& log);

/// Sets and event subsets of a log by resource and activity. Holds pointers
/// into the log, which must outlive the index.
struct LogIndex {
    std::vector<std::string> resources;   // sorted
    std::vector<std::string> activities;  // sorted
    std::map<std::string, std::set<std::string>> activities_of;  // A_r
    std::map<std::string, std::vector<const Event*>> by_resource;
    std::map<std::string, std::vector<const Event*>> by_activity;
    std::map<std::pair<std::string, std::string>, std::vector<const Event*>> by_pair;  // (r, activity)
    std::size_t total_events = 0;

    std::size_t count(const std::string& resource, const std::string& activity) const;
    const std::vector<const Event*>& events_of(const std::string& resource, const std::string& activity) const;
};

LogIndex build_index(const EventLog& log);

struct Summary {
    std::size_t count = 0;
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    double p50 = 0.0;
    double p90 = 0.0;
    double p95 = 0.0;

    friend bool operator==(const Summary&, const Summary&) = default;
};

/// Percentiles use linear interpolation between closest ranks.
Summary summarize(std::vector<double> values);

struct KpiReport {
    std::vector<std::pair<std::string, Seconds>> cycle_times;  // per trace, log order
    std::vector<Seconds> waiting_times;                        // per event, log order
    std::vector<Seconds> processing_times;
    std::map<std::string, double> utilization;  // only when calendars were given
    Summary cycle;
    Summary waiting;
    Summary processing;
    bool enablement_available = true;

    friend bool operator==(const KpiReport&, const KpiReport&) = default;
};

/// Waiting = start - enabled (0 without enablement), processing = end -
/// start, cycle = last end - first start. Utilization is in-calendar busy
/// time over in-calendar available time across the log's span, clamped to
/// [0, 1]. Throws UsageError on an empty log.
KpiReport compute_kpis(const EventLog& log, const std::map<std::string, WeeklyCalendar>* calendars = nullptr);

/// Fills the summaries from the raw series.
void finalize_kpis(KpiReport& report);

nlohmann::json to_json(const Summary& s);
nlohmann::json to_json(const KpiReport& report);

}  // namespace bpsim
