#pragma once

#include "bpsim/distribution.hpp"
#include "bpsim/event_log.hpp"
#include "bpsim/model.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace bpsim {

struct SimConfig {
    std::size_t cases = 1;
    Timestamp start_at = 0;
    std::uint64_t seed = 0;
    std::size_t max_events_per_case = 1000;
};

struct RunReport {
    std::size_t requested = 0;
    std::size_t completed = 0;
    std::size_t aborted = 0;
    std::size_t events = 0;
    std::uint64_t seed = 0;
    double wall_clock_seconds = 0.0;
    std::vector<std::string> aborted_cases;
};

nlohmann::json to_json(const RunReport& r);

struct SimulationResult {
    EventLog log;
    KpiReport kpis;
    RunReport report;
};

/// Case arrival instants: the first at next_available(AC, start_at), each
/// following one at next_available(AC, previous + draw from AT).
std::vector<Timestamp> generate_arrivals(const DifferentiatedSimModel& model, const SimConfig& config, Rng& rng);

/// Per-activity views over the allocated resources, ordered by readiness.
class DiffResourceQueue {
public:
    explicit DiffResourceQueue(const std::vector<ResourceProfile>& profiles);

    /// Index (into the profile list) of the allocated resource with minimal
    /// readyAt; ties go to the lexicographically smallest id. Throws
    /// ValidationError when nobody is allocated to the activity.
    std::size_t pop(const std::string& activity) const;

    Timestamp ready_at(std::size_t resource) const { return ready_at_[resource]; }
    void set_ready_at(std::size_t resource, Timestamp t) { ready_at_[resource] = t; }
    const std::vector<std::size_t>& view(const std::string& activity) const;

private:
    std::vector<std::string> ids_;
    std::map<std::string, std::vector<std::size_t>> views_;
    std::vector<Timestamp> ready_at_;
};

/// Marking of one case: token counts per flow.
struct CaseState {
    std::vector<int> tokens;
    std::size_t active = 0;  // enabled activities not yet completed

    bool finished() const;
};

/// BPMN token game over a graph with branching probabilities.
class TokenGame {
public:
    TokenGame(const ProcessGraph& graph, const BranchingProbabilities& bp);

    CaseState new_case() const;

    /// Places the start token and returns the task nodes it enables.
    std::vector<std::size_t> start(CaseState& state, Rng& rng) const;

    /// Completes `task`: a token goes to its outgoing flow and is propagated
    /// through gateways. Returns newly enabled task nodes.
    std::vector<std::size_t> complete(CaseState& state, std::size_t task, Rng& rng) const;

private:
    std::vector<std::size_t> propagate(CaseState& state, std::vector<std::size_t> marked, Rng& rng) const;

    const ProcessGraph& graph_;
    std::vector<double> probability_;  // per flow; used on exclusive splits only
};

/// Runs the differentiated simulation. Throws ValidationError for invalid
/// models and UsageError for cases == 0.
SimulationResult simulate(const DifferentiatedSimModel& model, const SimConfig& config);

/// Converts and simulates a classic pooled model.
SimulationResult simulate(const ClassicSimModel& model, const SimConfig& config);

}  // namespace bpsim
