#include "bpsim/scenario_io.hpp"

#include "bpsim/bpmn.hpp"
#include "bpsim/error.hpp"

#include <cmath>

namespace bpsim {

using nlohmann::json;

namespace {

const json& require(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key))
        throw ParseError("schema violation: " + where + " is missing '" + key + "'");
    return obj.at(key);
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
    const auto& v = require(obj, key, where);
    if (!v.is_string()) throw ParseError("schema violation: " + where + "." + key + " must be a string");
    return v.get<std::string>();
}

double require_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ParseError("schema violation: " + where + " must be a number");
    return v.get<double>();
}

void normalize_branching(const ProcessGraph& graph, BranchingProbabilities& bp) {
    for (auto g : graph.exclusive_splits()) {
        double sum = 0.0;
        bool complete = true;
        for (auto f : graph.node(g).outgoing) {
            auto it = bp.find(graph.flow(f).id);
            if (it == bp.end()) complete = false;
            else sum += it->second;
        }
        if (!complete || sum <= 0.0 || std::abs(sum - 1.0) > kProbabilityTolerance) continue;
        for (auto f : graph.node(g).outgoing) bp[graph.flow(f).id] /= sum;
    }
}

}  // namespace

json to_json(const DistributionSpec& d) {
    return json{{"family", std::string(family_name(d.family))}, {"params", d.params}};
}

DistributionSpec distribution_from_json(const json& j) {
    DistributionSpec d;
    d.family = parse_family(require_string(j, "family", "distribution"));
    const auto& params = require(j, "params", "distribution");
    if (!params.is_array()) throw ParseError("schema violation: distribution.params must be an array");
    d.params.clear();
    for (const auto& p : params) d.params.push_back(require_number(p, "distribution.params[]"));
    if (auto problem = check_distribution(d)) throw ValidationError("invalid distribution: " + *problem);
    return d;
}

json to_json(const WeeklyCalendar& cal) {
    json out = json::array();
    for (const auto& e : cal.entries())
        out.push_back({{"weekday", std::string(weekday_name(e.weekday))},
                       {"beginTime", format_time_of_day(e.begin)},
                       {"endTime", format_time_of_day(e.end)}});
    return out;
}

WeeklyCalendar calendar_from_json(const json& j) {
    if (!j.is_array()) throw ParseError("schema violation: calendar must be an array of entries");
    WeeklyCalendar cal;
    for (const auto& e : j) {
        CalendarEntry entry;
        entry.weekday = parse_weekday(require_string(e, "weekday", "calendar entry"));
        entry.begin = parse_time_of_day(require_string(e, "beginTime", "calendar entry"));
        entry.end = parse_time_of_day(require_string(e, "endTime", "calendar entry"));
        cal.add(entry);
    }
    return cal;
}

json scenario_to_json(const DifferentiatedSimModel& model, const json& provenance) {
    json profiles = json::array();
    for (const auto& p : model.profiles) {
        json acts = json::array();
        for (const auto& a : p.alloc) {
            json entry{{"activity", a}};
            if (auto it = p.perf.find(a); it != p.perf.end()) entry["distribution"] = to_json(it->second);
            acts.push_back(std::move(entry));
        }
        profiles.push_back(
            {{"id", p.id}, {"cost_per_hour", p.cost_per_hour}, {"calendar", to_json(p.avail)}, {"activities", acts}});
    }
    json bp = json::object();
    for (const auto& [flow, prob] : model.bp) bp[flow] = prob;
    json doc{{"version", 1},
             {"resource_profiles", profiles},
             {"branching_probabilities", bp},
             {"arrival", {{"distribution", to_json(model.arrival)}, {"calendar", to_json(model.arrival_calendar)}}}};
    if (provenance.is_object() && !provenance.empty()) doc["provenance"] = provenance;
    return doc;
}

std::string store_scenario(const DifferentiatedSimModel& model, const json& provenance) {
    return scenario_to_json(model, provenance).dump(2) + "\n";
}

DifferentiatedSimModel scenario_from_json(const json& doc, const ProcessGraph& graph) {
    if (!doc.is_object()) throw ParseError("schema violation: scenario must be a JSON object");
    DifferentiatedSimModel model;
    model.graph = graph;

    const auto& profiles = require(doc, "resource_profiles", "scenario");
    if (!profiles.is_array()) throw ParseError("schema violation: resource_profiles must be an array");
    for (const auto& jp : profiles) {
        ResourceProfile p;
        p.id = require_string(jp, "id", "resource profile");
        if (jp.contains("cost_per_hour")) p.cost_per_hour = require_number(jp.at("cost_per_hour"), p.id + ".cost_per_hour");
        p.avail = calendar_from_json(require(jp, "calendar", "resource profile '" + p.id + "'"));
        const auto& acts = require(jp, "activities", "resource profile '" + p.id + "'");
        if (!acts.is_array()) throw ParseError("schema violation: " + p.id + ".activities must be an array");
        for (const auto& ja : acts) {
            const auto label = require_string(ja, "activity", "profile '" + p.id + "' activity");
            if (!graph.find_task(label))
                throw ValidationError("unknown activity '" + label + "' in resource profile '" + p.id + "'");
            p.alloc.insert(label);
            p.perf[label] = distribution_from_json(require(ja, "distribution", "profile '" + p.id + "' activity '" + label + "'"));
        }
        model.profiles.push_back(std::move(p));
    }

    if (doc.contains("branching_probabilities")) {
        const auto& bp = doc.at("branching_probabilities");
        if (!bp.is_object()) throw ParseError("schema violation: branching_probabilities must be an object");
        for (const auto& [flow, prob] : bp.items())
            model.bp[flow] = require_number(prob, "branching_probabilities." + flow);
    }
    normalize_branching(graph, model.bp);

    const auto& arrival = require(doc, "arrival", "scenario");
    model.arrival = distribution_from_json(require(arrival, "distribution", "arrival"));
    model.arrival_calendar = calendar_from_json(require(arrival, "calendar", "arrival"));

    require_valid(model);
    return model;
}

DifferentiatedSimModel load_scenario(std::string_view json_text, const ProcessGraph& graph) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("scenario is not valid JSON: ") + e.what());
    }
    return scenario_from_json(doc, graph);
}

ScenarioBundle load_bundle(std::string_view bpmn_xml, std::string_view scenario_json) {
    ScenarioBundle b;
    b.graph = parse_bpmn(bpmn_xml);
    json doc;
    try {
        doc = json::parse(scenario_json);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("scenario is not valid JSON: ") + e.what());
    }
    b.model = scenario_from_json(doc, b.graph);
    if (doc.contains("provenance")) b.provenance = doc.at("provenance");
    return b;
}

}  // namespace bpsim
