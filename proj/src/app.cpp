#include "bpsim/app.hpp"

#include "bpsim/bpmn.hpp"
#include "bpsim/error.hpp"
#include "bpsim/event_log.hpp"

#include <limits>

namespace bpsim {

std::string render(const nlohmann::json& j) { return j.dump(2) + "\n"; }

namespace {

EventLog read_checked(std::string_view csv, std::vector<std::string>* warnings = nullptr) {
    auto r = read_log(csv);
    if (r.log.empty()) throw ValidationError("event log has no events");
    if (warnings) {
        for (auto& w : r.warnings) warnings->push_back(std::move(w));
        if (r.rejected_rows > 0)
            warnings->push_back(std::to_string(r.rejected_rows) + " rows rejected for out-of-order timestamps");
    }
    return std::move(r.log);
}

}  // namespace

DiscoverArtifacts run_discovery(std::string_view log_csv, std::string_view bpmn_xml, const DiscoveryParams& params,
                                const std::optional<GridSpec>& grid) {
    params.validate();
    const auto graph = parse_bpmn(bpmn_xml);
    std::vector<std::string> warnings;
    const auto log = read_checked(log_csv, &warnings);

    DiscoverArtifacts out;
    nlohmann::json report;
    DiscoveryParams chosen = params;
    if (grid) {
        auto search = grid_search(log, graph, *grid);
        chosen = search.evaluated.at(search.best).params;
        out.result = std::move(search.discovery);
        report = to_json(out.result.report);
        report["grid_search"] = to_json(search);
    } else {
        out.result = discover_resource_profiles(log, graph, params);
        report = to_json(out.result.report);
    }
    for (const auto& w : warnings) report["warnings"].push_back(w);

    Timestamp first = std::numeric_limits<Timestamp>::max();
    for (const auto& t : log.traces)
        if (!t.events.empty()) first = std::min(first, t.first_start());
    nlohmann::json provenance = {{"source", "discovery"},
                                 {"params", to_json(chosen)},
                                 {"log_first_start", format_timestamp(first)},
                                 {"log_cases", log.traces.size()}};
    out.scenario = store_scenario(out.result.model, provenance);
    out.report = render(report);
    return out;
}

std::optional<Timestamp> provenance_start(const nlohmann::json& provenance) {
    if (!provenance.is_object()) return std::nullopt;
    auto it = provenance.find("log_first_start");
    if (it == provenance.end() || !it->is_string()) return std::nullopt;
    return parse_timestamp(it->get<std::string>());
}

SimulateArtifacts run_simulation(const ScenarioBundle& bundle, const SimConfig& config) {
    SimulateArtifacts out;
    out.result = simulate(bundle.model, config);
    out.log = write_log(out.result.log);
    std::map<std::string, WeeklyCalendar> calendars;
    for (const auto& p : bundle.model.profiles) calendars[p.id] = p.avail;
    if (out.result.log.empty())
        out.kpis = render(nlohmann::json::object());
    else
        out.kpis = render(to_json(compute_kpis(out.result.log, &calendars)));
    auto report = to_json(out.result.report);
    report["start_at"] = format_timestamp(config.start_at);
    out.report = render(report);
    return out;
}

TableFormat parse_table_format(std::string_view s) {
    if (s == "csv") return TableFormat::Csv;
    if (s == "json") return TableFormat::Json;
    throw UsageError("unknown output format '" + std::string(s) + "'");
}

std::string run_evaluation(std::string_view real_csv, const std::vector<EvaluateInput>& simulated, TableFormat format,
                           Normalization n, RhythmMode mode) {
    if (simulated.empty()) throw UsageError("no simulated log to compare");
    const auto real = read_checked(real_csv);
    std::vector<EventLog> logs;
    logs.reserve(simulated.size());
    for (const auto& s : simulated) logs.push_back(read_checked(s.csv));
    std::vector<LabelledLog> labelled;
    for (std::size_t i = 0; i < logs.size(); ++i) labelled.push_back({simulated[i].label, &logs[i]});
    const auto table = compare_runs(real, labelled, n, mode);
    return format == TableFormat::Csv ? to_csv(table) : render(to_json(table));
}

}  // namespace bpsim
