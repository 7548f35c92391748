#include "bpsim/discovery.hpp"

#include "bpsim/error.hpp"
#include "bpsim/log_estimation.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>

namespace bpsim {

namespace {

// Distinct dates per (activity, weekday) and per (activity, granule).
struct ConfidenceTable {
    std::map<std::pair<std::string, Weekday>, std::set<std::int64_t>> dates_by_weekday;
    std::map<std::pair<std::string, CalendarEntry>, std::set<std::int64_t>> dates_by_granule;
    std::map<CalendarEntry, std::set<std::string>> activities_in;

    explicit ConfidenceTable(const CandidateMultiset& omega) {
        for (const auto& o : omega.observations) {
            dates_by_weekday[{o.activity, o.granule.weekday}].insert(o.day);
            dates_by_granule[{o.activity, o.granule}].insert(o.day);
            activities_in[o.granule].insert(o.activity);
        }
    }

    double operator()(const CalendarEntry& kappa) const {
        auto acts = activities_in.find(kappa);
        if (acts == activities_in.end()) return 0.0;
        double best = 0.0;
        for (const auto& a : acts->second) {
            const auto hit = dates_by_granule.at({a, kappa}).size();
            const auto all = dates_by_weekday.at({a, kappa.weekday}).size();
            best = std::max(best, static_cast<double>(hit) / static_cast<double>(all));
        }
        return best;
    }
};

std::vector<double> adjusted_durations(const std::vector<const Event*>& events,
                                       const std::map<const Event*, std::string>& owner,
                                       const std::map<std::string, WeeklyCalendar>& calendars) {
    std::vector<double> out;
    out.reserve(events.size());
    for (const Event* e : events) {
        Seconds d = e->processing_time();
        auto o = owner.find(e);
        if (o != owner.end()) {
            auto c = calendars.find(o->second);
            if (c != calendars.end()) {
                const Seconds adjusted = in_calendar_duration(c->second, e->start, e->complete);
                if (adjusted > 0) d = adjusted;
            }
        }
        out.push_back(static_cast<double>(d));
    }
    return out;
}

FitResult fit_samples(const std::vector<double>& samples) {
    if (samples.empty()) throw ValidationError("cannot fit a distribution to zero samples");
    if (samples.size() == 1) {
        FitResult r;
        r.spec = DistributionSpec::fixed(std::max(samples.front(), 0.0));
        return r;
    }
    return best_fitted_distribution(samples);
}

std::string aggregated_id(const std::string& activity, std::size_t k) {
    return "AGG_" + activity + "_" + std::to_string(k);
}

}  // namespace

std::string_view mode_name(DiscoveryMode m) {
    return m == DiscoveryMode::Differentiated ? "sp-dp-da" : "sp-np-na";
}

DiscoveryMode parse_mode(std::string_view name) {
    if (name == "sp-dp-da" || name == "SP-DP-DA") return DiscoveryMode::Differentiated;
    if (name == "sp-np-na" || name == "SP-NP-NA") return DiscoveryMode::Undifferentiated;
    throw UsageError("unknown discovery mode '" + std::string(name) + "' (expected sp-dp-da or sp-np-na)");
}

void DiscoveryParams::validate() const {
    check_granule(granule_minutes);
    auto unit = [](double v, const char* name) {
        if (!(v >= 0.0 && v <= 1.0)) throw UsageError(std::string(name) + " must lie in [0, 1]");
    };
    unit(confidence, "confidence");
    unit(support, "support");
    unit(participation, "participation");
    if (bin_size == 0) throw UsageError("bin size must be positive");
}

nlohmann::json to_json(const DiscoveryParams& p) {
    return {{"granule_minutes", p.granule_minutes}, {"confidence", p.confidence}, {"support", p.support},
            {"participation", p.participation},     {"bin_size", p.bin_size},     {"mode", std::string(mode_name(p.mode))}};
}

DiscoveryParams params_from_json(const nlohmann::json& j) {
    DiscoveryParams p;
    if (!j.is_object()) throw ParseError("discovery parameters must be a JSON object");
    try {
        if (j.contains("granule_minutes")) p.granule_minutes = j.at("granule_minutes").get<int>();
        if (j.contains("confidence")) p.confidence = j.at("confidence").get<double>();
        if (j.contains("support")) p.support = j.at("support").get<double>();
        if (j.contains("participation")) p.participation = j.at("participation").get<double>();
        if (j.contains("bin_size")) p.bin_size = j.at("bin_size").get<std::size_t>();
        if (j.contains("mode")) p.mode = parse_mode(j.at("mode").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("discovery parameters: ") + e.what());
    }
    p.validate();
    return p;
}

double confidence(const CalendarEntry& kappa, const CandidateMultiset& omega) {
    return ConfidenceTable(omega)(kappa);
}

double support(const WeeklyCalendar& cal, const CandidateMultiset& omega) {
    const auto total = omega.total();
    if (total == 0) return 0.0;
    std::int64_t covered = 0;
    for (const auto& [kappa, m] : omega.multiplicity)
        if (cal.covers(kappa)) covered += m;
    return static_cast<double>(covered) / static_cast<double>(total);
}

double participation(const std::string& resource, const LogIndex& index) {
    auto acts = index.activities_of.find(resource);
    if (acts == index.activities_of.end()) throw UsageError("resource '" + resource + "' is not in the log");
    std::size_t own = 0;
    std::size_t top = 0;
    for (const auto& a : acts->second) {
        own += index.count(resource, a);
        std::size_t best = 0;
        for (const auto& r : index.resources) best = std::max(best, index.count(r, a));
        top += best;
    }
    return top == 0 ? 0.0 : static_cast<double>(own) / static_cast<double>(top);
}

CalendarDiscovery discover_calendar_detailed(const CandidateMultiset& omega, double min_support,
                                             double min_confidence) {
    CalendarDiscovery out;
    if (omega.empty()) return out;
    const ConfidenceTable conf(omega);
    const auto total = omega.total();

    std::vector<std::pair<CalendarEntry, std::int64_t>> discarded;
    std::int64_t covered = 0;
    out.min_confidence = 1.0;
    for (const auto& [kappa, m] : omega.multiplicity) {
        const double c = conf(kappa);
        if (c >= min_confidence) {
            out.calendar.add(kappa);
            covered += m;
            ++out.admitted_by_confidence;
            out.min_confidence = std::min(out.min_confidence, c);
        } else {
            discarded.emplace_back(kappa, m);
        }
    }
    if (out.admitted_by_confidence == 0) out.min_confidence = 0.0;

    auto ratio = [&] { return static_cast<double>(covered) / static_cast<double>(total); };
    if (ratio() < min_support) {
        // Map order already sorts by weekday then begin; stable sort keeps it for ties.
        std::stable_sort(discarded.begin(), discarded.end(),
                         [](const auto& a, const auto& b) { return a.second > b.second; });
        for (const auto& [kappa, m] : discarded) {
            out.calendar.add(kappa);
            covered += m;
            ++out.added_for_support;
            if (ratio() >= min_support) break;
        }
    }
    out.support = support(out.calendar, omega);
    return out;
}

WeeklyCalendar discover_calendar(const CandidateMultiset& omega, double min_support, double min_confidence) {
    return discover_calendar_detailed(omega, min_support, min_confidence).calendar;
}

std::vector<std::vector<std::size_t>> max_disjoint_intervals(std::span<const TimeInterval> intervals) {
    std::vector<std::size_t> remaining(intervals.size());
    std::iota(remaining.begin(), remaining.end(), 0);
    std::sort(remaining.begin(), remaining.end(), [&](std::size_t a, std::size_t b) {
        const auto& x = intervals[a];
        const auto& y = intervals[b];
        if (x.end != y.end) return x.end < y.end;
        if (x.start != y.start) return x.start < y.start;
        return a < b;
    });
    std::vector<std::vector<std::size_t>> groups;
    while (!remaining.empty()) {
        std::vector<std::size_t> group;
        std::vector<std::size_t> rest;
        bool any = false;
        Timestamp last_end = 0;
        for (auto i : remaining) {
            if (!any || intervals[i].start >= last_end) {
                group.push_back(i);
                last_end = intervals[i].end;
                any = true;
            } else {
                rest.push_back(i);
            }
        }
        groups.push_back(std::move(group));
        remaining = std::move(rest);
    }
    return groups;
}

std::map<std::pair<std::string, std::string>, DistributionSpec> discover_processing_times(
    const LogIndex& index, const std::map<const Event*, std::string>& owner,
    const std::map<std::string, WeeklyCalendar>& calendars,
    const std::map<std::string, std::set<std::string>>& alloc, std::size_t bin_size, std::vector<FitInfo>* fits) {
    std::map<std::pair<std::string, std::string>, DistributionSpec> out;

    // Events attributed to each (profile, activity).
    std::map<std::pair<std::string, std::string>, std::vector<const Event*>> attributed;
    for (const auto& [e, profile] : owner) attributed[{profile, e->activity}].push_back(e);
    for (auto& [key, events] : attributed)
        std::sort(events.begin(), events.end(), [](const Event* a, const Event* b) {
            return a->start != b->start ? a->start < b->start : a->complete < b->complete;
        });

    std::map<std::string, std::vector<std::string>> executors;
    for (const auto& [profile, acts] : alloc)
        for (const auto& a : acts) executors[a].push_back(profile);

    for (const auto& [activity, profiles] : executors) {
        auto all = index.by_activity.find(activity);
        if (all == index.by_activity.end() || all->second.empty())
            throw ValidationError("activity '" + activity + "' has zero events");
        std::optional<FitResult> joint;
        for (const auto& profile : profiles) {
            auto own = attributed.find({profile, activity});
            const std::size_t count = own == attributed.end() ? 0 : own->second.size();
            if (count >= bin_size) {
                auto fit = fit_samples(adjusted_durations(own->second, owner, calendars));
                out[{profile, activity}] = fit.spec;
                if (fits)
                    fits->push_back({profile, activity, std::string(family_name(fit.spec.family)), fit.residual, count, true});
                continue;
            }
            if (!joint) joint = fit_samples(adjusted_durations(all->second, owner, calendars));
            out[{profile, activity}] = joint->spec;
            if (fits)
                fits->push_back({profile, activity, std::string(family_name(joint->spec.family)), joint->residual,
                                 all->second.size(), false});
        }
    }
    return out;
}

namespace {

void check_log_against_graph(const LogIndex& index, const ProcessGraph& graph) {
    for (const auto& a : index.activities)
        if (!graph.find_task(a)) throw ValidationError("activity '" + a + "' in log is not in the process model");
}

void finish_model(DiscoveryResult& result, const EventLog& log, const ProcessGraph& graph,
                  const LogIndex& index, const std::map<std::string, WeeklyCalendar>& calendars,
                  const std::map<std::string, std::set<std::string>>& alloc,
                  const std::map<const Event*, std::string>& owner, std::size_t bin_size) {
    const auto& params = result.report.params;
    auto perf = discover_processing_times(index, owner, calendars, alloc, bin_size, &result.report.fits);

    auto& model = result.model;
    model.graph = graph;
    for (const auto& [id, acts] : alloc) {
        ResourceProfile p;
        p.id = id;
        p.alloc = acts;
        p.avail = calendars.at(id);
        for (const auto& a : acts) p.perf[a] = perf.at({id, a});
        model.profiles.push_back(std::move(p));
    }
    for (const auto& label : graph.activity_labels()) {
        if (index.by_activity.contains(label)) continue;
        ResourceProfile p;
        p.id = aggregated_id(label, 0);
        p.alloc = {label};
        p.perf[label] = DistributionSpec::fixed(0);
        p.avail = WeeklyCalendar::always();
        model.profiles.push_back(std::move(p));
        result.report.unobserved_activities.push_back(label);
        result.report.warnings.push_back("activity '" + label +
                                         "' never occurs in the log; allocated to an always-available zero-time resource");
    }

    auto branching = estimate_branching(log, graph);
    model.bp = branching.probabilities;
    result.report.replayed_traces = branching.replayed;
    result.report.skipped_traces = branching.skipped;
    result.report.unreached_gateways = branching.unreached_gateways;
    for (const auto& g : branching.unreached_gateways)
        result.report.warnings.push_back("gateway '" + g + "' never reached during replay; uniform probabilities used");

    if (log.traces.size() >= 2) {
        auto arrival = estimate_interarrival(log, params.granule_minutes, params.support, params.confidence);
        model.arrival = arrival.distribution;
        model.arrival_calendar = arrival.calendar;
    } else {
        model.arrival = DistributionSpec::fixed(0);
        model.arrival_calendar = WeeklyCalendar::always();
        result.report.warnings.push_back("fewer than 2 traces; arrival model defaulted to fixed(0) on a 24/7 calendar");
    }
    result.report.arrival_family = std::string(family_name(model.arrival.family));
}

void record_calendar(DiscoveryReport& report, const std::string& id, const CalendarDiscovery& d) {
    report.calendars.push_back({id, d.support, d.min_confidence, d.admitted_by_confidence, d.added_for_support});
}

DiscoveryResult discover_undifferentiated(const EventLog& log, const ProcessGraph& graph, const LogIndex& index,
                                          const DiscoveryParams& params) {
    DiscoveryResult result;
    result.report.params = params;
    std::vector<const Event*> all;
    for (const auto& t : log.traces)
        for (const auto& e : t.events) all.push_back(&e);
    auto omega = extract_candidates(all, params.granule_minutes);
    auto shared = discover_calendar_detailed(omega, params.support, params.confidence);
    if (shared.calendar.empty()) {
        for (const auto& [kappa, m] : omega.multiplicity) shared.calendar.add(kappa);
        shared.support = support(shared.calendar, omega);
        result.report.warnings.push_back("shared calendar empty after filtering; unrestricted calendar used");
    }

    std::map<std::string, WeeklyCalendar> calendars;
    std::map<std::string, std::set<std::string>> alloc;
    std::map<const Event*, std::string> owner;
    for (const auto& r : index.resources) {
        result.report.participation[r] = participation(r, index);
        result.report.resource_status[r] = "kept";
        calendars[r] = shared.calendar;
        alloc[r] = index.activities_of.at(r);
        record_calendar(result.report, r, shared);
        for (const Event* e : index.by_resource.at(r)) owner[e] = r;
    }
    // Pooled performance: every profile shares the per-activity fit.
    finish_model(result, log, graph, index, calendars, alloc, owner, std::numeric_limits<std::size_t>::max());
    return result;
}

DiscoveryResult discover_differentiated(const EventLog& log, const ProcessGraph& graph, const LogIndex& index,
                                        const DiscoveryParams& params) {
    DiscoveryResult result;
    auto& report = result.report;
    report.params = params;

    std::map<std::string, WeeklyCalendar> calendars;
    std::map<std::string, std::set<std::string>> alloc;
    std::map<const Event*, std::string> owner;
    std::set<std::string> discarded;

    for (const auto& r : index.resources) {
        const double part = participation(r, index);
        report.participation[r] = part;
        if (part >= params.participation) {
            auto omega = extract_candidates(index.by_resource.at(r), params.granule_minutes);
            auto found = discover_calendar_detailed(omega, params.support, params.confidence);
            if (!found.calendar.empty()) {
                calendars[r] = found.calendar;
                alloc[r] = index.activities_of.at(r);
                for (const Event* e : index.by_resource.at(r)) owner[e] = r;
                report.resource_status[r] = "kept";
                record_calendar(report, r, found);
                continue;
            }
        }
        discarded.insert(r);
        report.resource_status[r] = "discarded";
    }

    for (const auto& activity : index.activities) {
        std::vector<const Event*> pool;
        std::vector<std::string> sources;
        for (const auto& r : index.resources) {
            if (!discarded.contains(r)) continue;
            const auto& evs = index.events_of(r, activity);
            if (evs.empty()) continue;
            pool.insert(pool.end(), evs.begin(), evs.end());
            sources.push_back(r);
        }
        if (pool.empty()) continue;

        std::vector<TimeInterval> intervals;
        for (const Event* e : pool) intervals.push_back({e->start, e->complete});
        auto groups = max_disjoint_intervals(intervals);
        bool created = false;
        for (std::size_t k = 0; k < groups.size(); ++k) {
            std::vector<const Event*> members;
            for (auto i : groups[k]) members.push_back(pool[i]);
            auto omega = extract_candidates(members, params.granule_minutes);
            auto found = discover_calendar_detailed(omega, params.support, params.confidence);
            if (found.calendar.empty()) continue;
            const auto id = aggregated_id(activity, k + 1);
            calendars[id] = found.calendar;
            alloc[id] = {activity};
            std::set<std::string> group_sources;
            for (const Event* e : members) {
                owner[e] = id;
                group_sources.insert(e->resource);
                report.resource_status[e->resource] = "merged";
            }
            report.aggregated.push_back(
                {id, activity, {group_sources.begin(), group_sources.end()}, members.size(), false});
            record_calendar(report, id, found);
            created = true;
        }

        const bool executable =
            created || std::any_of(alloc.begin(), alloc.end(), [&](const auto& kv) { return kv.second.contains(activity); });
        if (!executable) {
            auto omega = extract_candidates(pool, params.granule_minutes);
            WeeklyCalendar unrestricted;
            for (const auto& [kappa, m] : omega.multiplicity) unrestricted.add(kappa);
            const auto id = aggregated_id(activity, 1);
            calendars[id] = unrestricted;
            alloc[id] = {activity};
            for (const Event* e : pool) {
                owner[e] = id;
                report.resource_status[e->resource] = "merged";
            }
            report.aggregated.push_back({id, activity, sources, pool.size(), true});
            report.unallocated_fallbacks.push_back(activity);
            report.calendars.push_back({id, support(unrestricted, omega), 0.0, 0, omega.multiplicity.size()});
        }
    }

    finish_model(result, log, graph, index, calendars, alloc, owner, params.bin_size);
    return result;
}

}  // namespace

DiscoveryResult discover_resource_profiles(const EventLog& log, const ProcessGraph& graph,
                                           const DiscoveryParams& params) {
    params.validate();
    if (log.empty() || log.event_count() == 0) throw UsageError("cannot discover a model from an empty log");
    auto index = build_index(log);
    check_log_against_graph(index, graph);
    return params.mode == DiscoveryMode::Differentiated ? discover_differentiated(log, graph, index, params)
                                                        : discover_undifferentiated(log, graph, index, params);
}

nlohmann::json to_json(const DiscoveryReport& r) {
    using nlohmann::json;
    json calendars = json::array();
    for (const auto& c : r.calendars)
        calendars.push_back({{"resource", c.resource},
                             {"support", c.support},
                             {"min_confidence", c.min_confidence},
                             {"admitted_by_confidence", c.admitted_by_confidence},
                             {"added_for_support", c.added_for_support}});
    json aggregated = json::array();
    for (const auto& a : r.aggregated)
        aggregated.push_back({{"id", a.id},
                              {"activity", a.activity},
                              {"sources", a.sources},
                              {"events", a.events},
                              {"unrestricted_calendar", a.unrestricted},
                              {"aggregated", true}});
    json fits = json::array();
    for (const auto& f : r.fits)
        fits.push_back({{"resource", f.resource},
                        {"activity", f.activity},
                        {"family", f.family},
                        {"residual", f.residual},
                        {"samples", f.samples},
                        {"individual", f.individual}});
    return {{"params", to_json(r.params)},
            {"participation", r.participation},
            {"resource_status", r.resource_status},
            {"calendars", calendars},
            {"aggregated_resources", aggregated},
            {"unallocated_fallbacks", r.unallocated_fallbacks},
            {"unobserved_activities", r.unobserved_activities},
            {"fits", fits},
            {"replay", {{"replayed", r.replayed_traces}, {"skipped", r.skipped_traces}, {"unreached_gateways", r.unreached_gateways}}},
            {"arrival_family", r.arrival_family},
            {"warnings", r.warnings}};
}

}  // namespace bpsim
