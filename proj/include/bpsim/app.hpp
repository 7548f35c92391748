#pragma once

#include "bpsim/discovery.hpp"
#include "bpsim/metrics.hpp"
#include "bpsim/scenario_io.hpp"
#include "bpsim/simulator.hpp"
#include "bpsim/tuning.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Operations shared by the command line and the HTTP service. Both
// frontends write exactly the strings produced here.
namespace bpsim {

/// Monday 2024-01-01 00:00, used when neither the caller nor the scenario
/// provenance names a start instant.
inline constexpr Timestamp kDefaultStartAt = 1704067200;

struct DiscoverArtifacts {
    std::string scenario;  // scenario JSON document
    std::string report;    // discovery report JSON
    DiscoveryResult result;
};

/// Reads the log and the BPMN model, discovers a scenario and renders both
/// documents. With a grid, the parameter sweep picks the parameters and the
/// report gains a "grid_search" section.
DiscoverArtifacts run_discovery(std::string_view log_csv, std::string_view bpmn_xml, const DiscoveryParams& params,
                                const std::optional<GridSpec>& grid = std::nullopt);

struct SimulateArtifacts {
    std::string log;     // CSV
    std::string kpis;    // JSON
    std::string report;  // JSON, includes wall-clock time
    SimulationResult result;
};

/// Start instant recorded in a scenario's provenance, if any.
std::optional<Timestamp> provenance_start(const nlohmann::json& provenance);

SimulateArtifacts run_simulation(const ScenarioBundle& bundle, const SimConfig& config);

struct EvaluateInput {
    std::string label;
    std::string csv;
};

enum class TableFormat { Csv, Json };
TableFormat parse_table_format(std::string_view s);

std::string run_evaluation(std::string_view real_csv, const std::vector<EvaluateInput>& simulated, TableFormat format,
                           Normalization n = Normalization::Normalized, RhythmMode mode = RhythmMode::AbsoluteHour);

/// Pretty JSON with a trailing newline, the on-disk format of every JSON
/// artifact.
std::string render(const nlohmann::json& j);

}  // namespace bpsim
