#pragma once

#include "bpsim/calendar.hpp"
#include "bpsim/distribution.hpp"
#include "bpsim/process_graph.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace bpsim {

/// Outgoing flow id of an exclusive split -> probability.
using BranchingProbabilities = std::map<std::string, double>;

inline constexpr double kProbabilityTolerance = 1e-6;

/// One individually modelled resource.
struct ResourceProfile {
    std::string id;
    std::set<std::string> alloc;                     // activity labels
    std::map<std::string, DistributionSpec> perf;    // keyed by activity label
    WeeklyCalendar avail;
    double cost_per_hour = 0.0;

    friend bool operator==(const ResourceProfile&, const ResourceProfile&) = default;
};

struct DifferentiatedSimModel {
    ProcessGraph graph;
    std::vector<ResourceProfile> profiles;
    BranchingProbabilities bp;
    DistributionSpec arrival = DistributionSpec::exponential(3600);
    WeeklyCalendar arrival_calendar = WeeklyCalendar::always();

    const ResourceProfile* find_profile(const std::string& id) const;

    friend bool operator==(const DifferentiatedSimModel&, const DifferentiatedSimModel&) = default;
};

struct ResourcePool {
    std::string id;
    int size = 1;
    WeeklyCalendar avail;
    double cost_per_hour = 0.0;
};

/// Pooled allocation with undifferentiated resources.
struct ClassicSimModel {
    ProcessGraph graph;
    std::vector<ResourcePool> pools;
    std::map<std::string, std::string> alloc;       // activity label -> pool id
    std::map<std::string, DistributionSpec> pt;     // activity label -> processing time
    BranchingProbabilities bp;
    DistributionSpec arrival = DistributionSpec::exponential(3600);
    WeeklyCalendar arrival_calendar = WeeklyCalendar::always();
};

/// Every broken invariant, one message per offending element. Empty iff the
/// model is well formed.
std::vector<std::string> validate_model(const DifferentiatedSimModel& model);
std::vector<std::string> validate_model(const ClassicSimModel& model);

/// Checks only the branching probabilities against the graph.
std::vector<std::string> validate_branching(const ProcessGraph& graph, const BranchingProbabilities& bp);

/// Throws ValidationError listing every violation.
void require_valid(const DifferentiatedSimModel& model);

/// Each pool of size k becomes k profiles "<pool>_1" .. "<pool>_k" sharing
/// the pool's calendar, cost and per-activity distributions.
DifferentiatedSimModel classic_to_differentiated(const ClassicSimModel& model);

}  // namespace bpsim
