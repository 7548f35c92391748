#include "bpsim/tuning.hpp"

#include "bpsim/error.hpp"
#include "bpsim/metrics.hpp"
#include "bpsim/simulator.hpp"

#include <limits>

namespace bpsim {

GridSpec grid_from_json(const nlohmann::json& j) {
    GridSpec g;
    if (!j.is_object()) throw UsageError("grid configuration must be an object");
    if (j.contains("granules")) g.granules = j.at("granules").get<std::vector<int>>();
    if (j.contains("confidences")) g.confidences = j.at("confidences").get<std::vector<double>>();
    if (j.contains("supports")) g.supports = j.at("supports").get<std::vector<double>>();
    if (j.contains("participations")) g.participations = j.at("participations").get<std::vector<double>>();
    if (j.contains("seed")) g.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("mode")) g.mode = parse_mode(j.at("mode").get<std::string>());
    if (j.contains("bin_size")) g.bin_size = j.at("bin_size").get<std::size_t>();
    return g;
}

GridSearchResult grid_search(const EventLog& log, const ProcessGraph& graph, const GridSpec& grid) {
    if (grid.granules.empty() || grid.confidences.empty() || grid.supports.empty() || grid.participations.empty())
        throw UsageError("empty parameter grid");
    if (log.empty()) throw UsageError("empty log");

    Timestamp first = std::numeric_limits<Timestamp>::max();
    std::size_t cases = 0;
    for (const auto& t : log.traces) {
        if (t.events.empty()) continue;
        first = std::min(first, t.first_start());
        ++cases;
    }
    SimConfig config;
    config.cases = cases;
    config.start_at = first;
    config.seed = grid.seed;

    GridSearchResult out;
    double best = std::numeric_limits<double>::infinity();
    for (int g : grid.granules)
        for (double c : grid.confidences)
            for (double s : grid.supports)
                for (double p : grid.participations) {
                    DiscoveryParams params;
                    params.granule_minutes = g;
                    params.confidence = c;
                    params.support = s;
                    params.participation = p;
                    params.bin_size = grid.bin_size;
                    params.mode = grid.mode;
                    params.validate();
                    auto discovered = discover_resource_profiles(log, graph, params);
                    const auto sim = simulate(discovered.model, config);
                    GridPoint point{params, std::numeric_limits<double>::infinity()};
                    if (!sim.log.empty()) point.emd_ct = emd_ct(log, sim.log);
                    out.evaluated.push_back(point);
                    if (point.emd_ct < best) {
                        best = point.emd_ct;
                        out.best = out.evaluated.size() - 1;
                        out.discovery = std::move(discovered);
                    }
                }
    if (!(best < std::numeric_limits<double>::infinity())) throw ValidationError("no grid point produced a simulated log");
    return out;
}

nlohmann::json to_json(const GridSearchResult& r) {
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : r.evaluated) points.push_back({{"params", to_json(p.params)}, {"emd_ct", p.emd_ct}});
    return {{"evaluated", points}, {"best", to_json(r.evaluated.at(r.best).params)},
            {"best_emd_ct", r.evaluated.at(r.best).emd_ct}};
}

}  // namespace bpsim
