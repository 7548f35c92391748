#pragma once

#include "bpsim/calendar.hpp"
#include "bpsim/event_log.hpp"
#include "bpsim/fitting.hpp"
#include "bpsim/model.hpp"

#include <json.hpp>

#include <map>
#include <span>
#include <string>
#include <vector>

namespace bpsim {

enum class DiscoveryMode {
    Differentiated,   // SP-DP-DA
    Undifferentiated  // SP-NP-NA baseline
};

std::string_view mode_name(DiscoveryMode m);
DiscoveryMode parse_mode(std::string_view name);

struct DiscoveryParams {
    int granule_minutes = 60;
    double confidence = 0.1;
    double support = 0.7;
    double participation = 0.4;
    std::size_t bin_size = 50;
    DiscoveryMode mode = DiscoveryMode::Differentiated;

    /// Throws UsageError when a threshold leaves [0, 1], the granule does not
    /// divide a day, or bin_size is zero.
    void validate() const;
};

nlohmann::json to_json(const DiscoveryParams& p);
/// Missing keys keep their defaults.
DiscoveryParams params_from_json(const nlohmann::json& j);

/// Activity-conditioned confidence of a granule: for each activity seen in
/// the granule, the share of distinct dates (of the granule's weekday) with
/// that activity on which the granule was hit; maximum over activities.
double confidence(const CalendarEntry& kappa, const CandidateMultiset& omega);

/// Covered multiplicity over total multiplicity (0 for an empty multiset).
double support(const WeeklyCalendar& cal, const CandidateMultiset& omega);

/// Events of r over the sum, across r's activities, of the top executor's
/// event count.
double participation(const std::string& resource, const LogIndex& index);

struct CalendarDiscovery {
    WeeklyCalendar calendar;
    double support = 0.0;
    double min_confidence = 0.0;  // over entries admitted by confidence
    std::size_t admitted_by_confidence = 0;
    std::size_t added_for_support = 0;
};

/// Admits candidates with confidence >= min_confidence, then, while support
/// stays below min_support, adds the remaining candidates by decreasing
/// multiplicity (ties: weekday, then begin time).
CalendarDiscovery discover_calendar_detailed(const CandidateMultiset& omega, double min_support, double min_confidence);
WeeklyCalendar discover_calendar(const CandidateMultiset& omega, double min_support, double min_confidence);

struct TimeInterval {
    Timestamp start = 0;
    Timestamp end = 0;
};

/// Repeatedly extracts a maximum-cardinality set of pairwise-disjoint
/// intervals (earliest-finish greedy) until none remain. Intervals that only
/// touch count as disjoint. Returns groups of input indices.
std::vector<std::vector<std::size_t>> max_disjoint_intervals(std::span<const TimeInterval> intervals);

struct FitInfo {
    std::string resource;
    std::string activity;
    std::string family;
    double residual = 0.0;
    std::size_t samples = 0;
    bool individual = false;  // false: shared fit over all events of the activity
};

struct CalendarInfo {
    std::string resource;
    double support = 0.0;
    double min_confidence = 0.0;
    std::size_t admitted_by_confidence = 0;
    std::size_t added_for_support = 0;
};

struct AggregatedInfo {
    std::string id;
    std::string activity;
    std::vector<std::string> sources;
    std::size_t events = 0;
    bool unrestricted = false;  // calendar built without confidence/support filtering
};

struct DiscoveryReport {
    DiscoveryParams params;
    std::map<std::string, double> participation;
    std::map<std::string, std::string> resource_status;  // kept | discarded | merged
    std::vector<CalendarInfo> calendars;
    std::vector<AggregatedInfo> aggregated;
    std::vector<std::string> unallocated_fallbacks;  // activities needing an unrestricted calendar
    std::vector<std::string> unobserved_activities;  // in the graph but absent from the log
    std::vector<FitInfo> fits;
    std::size_t replayed_traces = 0;
    std::size_t skipped_traces = 0;
    std::vector<std::string> unreached_gateways;
    std::string arrival_family;
    std::vector<std::string> warnings;
};

nlohmann::json to_json(const DiscoveryReport& r);

struct DiscoveryResult {
    DifferentiatedSimModel model;
    DiscoveryReport report;
};

/// Calendar-adjusted fitting per (profile, activity). `owner` maps each event
/// to the profile it is attributed to (events without an owner keep their
/// raw duration). Profiles with at least bin_size events of an activity get
/// an individual fit, the rest share the fit over all events of it.
std::map<std::pair<std::string, std::string>, DistributionSpec> discover_processing_times(
    const LogIndex& index, const std::map<const Event*, std::string>& owner,
    const std::map<std::string, WeeklyCalendar>& calendars,
    const std::map<std::string, std::set<std::string>>& alloc, std::size_t bin_size,
    std::vector<FitInfo>* fits = nullptr);

/// Discovers a simulation model from the log over the given graph. Throws
/// UsageError on an empty log and ValidationError when the log mentions an
/// activity the graph lacks.
DiscoveryResult discover_resource_profiles(const EventLog& log, const ProcessGraph& graph,
                                           const DiscoveryParams& params);

}  // namespace bpsim
