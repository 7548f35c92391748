#pragma once

#include "bpsim/model.hpp"

#include <json.hpp>

#include <string>
#include <string_view>

namespace bpsim {

/// A graph plus its simulation parameters and where they came from.
struct ScenarioBundle {
    ProcessGraph graph;
    DifferentiatedSimModel model;
    nlohmann::json provenance = nlohmann::json::object();
};

nlohmann::json to_json(const DistributionSpec& d);
DistributionSpec distribution_from_json(const nlohmann::json& j);

nlohmann::json to_json(const WeeklyCalendar& cal);
WeeklyCalendar calendar_from_json(const nlohmann::json& j);

/// Scenario document for the model (graph excluded). Provenance is written
/// only when it is a non-empty object.
nlohmann::json scenario_to_json(const DifferentiatedSimModel& model,
                                const nlohmann::json& provenance = nlohmann::json::object());
std::string store_scenario(const DifferentiatedSimModel& model,
                           const nlohmann::json& provenance = nlohmann::json::object());

/// Resolves activity labels against `graph` and validates the result.
/// Branching probabilities within 1e-6 of summing to one are renormalized.
/// Throws ParseError on schema violations and ValidationError on unknown
/// activities or invariant failures.
DifferentiatedSimModel load_scenario(std::string_view json_text, const ProcessGraph& graph);
DifferentiatedSimModel scenario_from_json(const nlohmann::json& doc, const ProcessGraph& graph);

ScenarioBundle load_bundle(std::string_view bpmn_xml, std::string_view scenario_json);

}  // namespace bpsim
