#pragma once

#include "bpsim/calendar.hpp"
#include "bpsim/distribution.hpp"
#include "bpsim/event.hpp"
#include "bpsim/model.hpp"

#include <string>
#include <vector>

namespace bpsim {

struct BranchingEstimate {
    BranchingProbabilities probabilities;
    std::size_t replayed = 0;
    std::size_t skipped = 0;
    std::vector<std::string> skipped_cases;
    std::vector<std::string> unreached_gateways;  // given uniform probabilities

    double skip_rate() const {
        const auto total = replayed + skipped;
        return total == 0 ? 0.0 : static_cast<double>(skipped) / static_cast<double>(total);
    }
};

/// Replays every trace on the graph (events in start order, gateways fired
/// silently along the shortest gateway-only path to the next activity) and
/// counts exclusive-split traversals. Traces that cannot be replayed are
/// skipped. Throws ValidationError if the log uses an unknown activity.
BranchingEstimate estimate_branching(const EventLog& log, const ProcessGraph& graph);

struct ArrivalEstimate {
    DistributionSpec distribution;
    WeeklyCalendar calendar;
};

/// Case start = earliest start of the trace. Inter-arrival gaps between
/// sorted case starts, counted in seconds inside the arrival calendar mined
/// from the case starts, are fitted. Throws UsageError with fewer than 2
/// traces.
ArrivalEstimate estimate_interarrival(const EventLog& log, int granule_minutes = 60, double min_support = 0.7,
                                      double min_confidence = 0.1);

}  // namespace bpsim
