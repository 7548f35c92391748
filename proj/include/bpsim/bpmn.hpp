#pragma once

#include "bpsim/process_graph.hpp"

#include <string>
#include <string_view>

namespace bpsim {

/// Parses the supported BPMN 2.0 subset: one process with startEvent,
/// endEvent, task, exclusiveGateway, parallelGateway and sequenceFlow.
/// Diagram-interchange and extension content is skipped; any other element
/// of the BPMN model namespace is rejected by name. Throws ParseError for
/// malformed XML or unsupported elements, ValidationError for graphs that
/// break the structural invariants.
ProcessGraph parse_bpmn(std::string_view xml);

/// Serializes a graph as a minimal BPMN 2.0 document (no diagram section).
std::string write_bpmn(const ProcessGraph& graph, const std::string& process_id = "process");

}  // namespace bpsim
