#pragma once

#include "bpsim/discovery.hpp"

#include <json.hpp>

#include <cstdint>
#include <vector>

namespace bpsim {

/// Candidate values swept by the parameter search. The defaults follow the
/// ranges of the evaluation: confidence 0.1 to 0.5, support and
/// participation 0.5 to 1.0, 60 minute granules.
struct GridSpec {
    std::vector<int> granules{60};
    std::vector<double> confidences{0.1, 0.2, 0.3, 0.4, 0.5};
    std::vector<double> supports{0.5, 0.75, 1.0};
    std::vector<double> participations{0.5, 0.75, 1.0};
    std::uint64_t seed = 1;
    DiscoveryMode mode = DiscoveryMode::Differentiated;
    std::size_t bin_size = 50;
};

GridSpec grid_from_json(const nlohmann::json& j);

struct GridPoint {
    DiscoveryParams params;
    double emd_ct = 0.0;
};

struct GridSearchResult {
    std::vector<GridPoint> evaluated;  // sweep order
    std::size_t best = 0;
    DiscoveryResult discovery;         // for the best tuple
};

/// Discovers a model for every tuple, re-simulates as many cases as the log
/// holds from its first start, and keeps the tuple with the lowest EMD-CT
/// (earliest in sweep order on ties). Throws UsageError on an empty grid.
GridSearchResult grid_search(const EventLog& log, const ProcessGraph& graph, const GridSpec& grid);

nlohmann::json to_json(const GridSearchResult& r);

}  // namespace bpsim
