// Command-line front end: discover, simulate, evaluate, serve.

#include "bpsim/app.hpp"
#include "bpsim/error.hpp"
#include "bpsim/service.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace bpsim;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + path + "'");
    out << content;
}

struct DiscoverArgs {
    std::string log, bpmn, out, report, mode = "sp-dp-da", config;
    int granule = 60;
    double conf = 0.1, supp = 0.7, part = 0.4;
    std::size_t bin_size = 50;
    bool grid = false;
};

int run_discover(const DiscoverArgs& a, const CLI::App& cmd) {
    DiscoveryParams params;
    std::optional<GridSpec> grid;
    if (!a.config.empty()) {
        const auto cfg = nlohmann::json::parse(read_file(a.config));
        if (cfg.contains("params")) params = params_from_json(cfg.at("params"));
        if (cfg.contains("grid")) grid = grid_from_json(cfg.at("grid"));
    }
    // Flags given on the command line win over the config file.
    if (cmd.count("--granule")) params.granule_minutes = a.granule;
    if (cmd.count("--conf")) params.confidence = a.conf;
    if (cmd.count("--supp")) params.support = a.supp;
    if (cmd.count("--part")) params.participation = a.part;
    if (cmd.count("--bin-size")) params.bin_size = a.bin_size;
    if (cmd.count("--mode") || a.config.empty()) params.mode = parse_mode(a.mode);
    if (a.grid && !grid) grid = GridSpec{};
    if (!a.grid) grid.reset();
    if (grid) {
        grid->mode = params.mode;
        grid->bin_size = params.bin_size;
    }

    auto out = run_discovery(read_file(a.log), read_file(a.bpmn), params, grid);
    write_file(a.out, out.scenario);
    if (!a.report.empty()) write_file(a.report, out.report);
    std::cerr << "discovered " << out.result.model.profiles.size() << " resource profiles\n";
    return 0;
}

struct SimulateArgs {
    std::string bpmn, scenario, start_at, out_log, out_kpis, out_report;
    long long cases = 0;
    std::uint64_t seed = 0;
    long long max_events = 1000;
};

int run_simulate(const SimulateArgs& a) {
    if (a.cases < 1) throw UsageError("number of cases must be at least 1");
    if (a.max_events < 1) throw UsageError("max events per case must be at least 1");
    const auto bundle = load_bundle(read_file(a.bpmn), read_file(a.scenario));
    SimConfig config;
    config.cases = static_cast<std::size_t>(a.cases);
    config.seed = a.seed;
    config.max_events_per_case = static_cast<std::size_t>(a.max_events);
    config.start_at = a.start_at.empty() ? provenance_start(bundle.provenance).value_or(kDefaultStartAt)
                                         : parse_timestamp(a.start_at);
    const auto out = run_simulation(bundle, config);
    write_file(a.out_log, out.log);
    if (!a.out_kpis.empty()) write_file(a.out_kpis, out.kpis);
    if (!a.out_report.empty()) write_file(a.out_report, out.report);
    const auto& r = out.result.report;
    std::cerr << "simulated " << r.completed << " cases (" << r.aborted << " aborted) in " << r.wall_clock_seconds
              << " s\n";
    return 0;
}

struct EvaluateArgs {
    std::string real, out, format = "csv", normalization = "normalized", rhythm = "absolute-hour";
    std::vector<std::string> simulated;
};

int run_evaluate(const EvaluateArgs& a) {
    std::vector<EvaluateInput> inputs;
    for (const auto& path : a.simulated) inputs.push_back({path, read_file(path)});
    write_file(a.out, run_evaluation(read_file(a.real), inputs, parse_table_format(a.format),
                                     parse_normalization(a.normalization), parse_rhythm_mode(a.rhythm)));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Business process simulation with differentiated resources"};
    app.require_subcommand(1);

    DiscoverArgs d;
    auto* discover = app.add_subcommand("discover", "Discover a simulation scenario from an event log");
    discover->add_option("--log", d.log, "Event log CSV")->required();
    discover->add_option("--bpmn", d.bpmn, "BPMN process model")->required();
    discover->add_option("--out", d.out, "Scenario JSON output (default stdout)");
    discover->add_option("--report", d.report, "Discovery report JSON output");
    discover->add_option("--mode", d.mode, "sp-dp-da or sp-np-na");
    discover->add_option("--granule", d.granule, "Calendar granule in minutes");
    discover->add_option("--conf", d.conf, "Minimum confidence");
    discover->add_option("--supp", d.supp, "Minimum support");
    discover->add_option("--part", d.part, "Minimum participation");
    discover->add_option("--bin-size", d.bin_size, "Minimum samples for an individual fit");
    discover->add_flag("--grid-search", d.grid, "Sweep parameters and keep the best round trip");
    discover->add_option("--config", d.config, "JSON file with 'params' and/or 'grid'");

    SimulateArgs s;
    auto* sim = app.add_subcommand("simulate", "Simulate a scenario");
    sim->add_option("--bpmn", s.bpmn, "BPMN process model")->required();
    sim->add_option("--scenario", s.scenario, "Scenario JSON")->required();
    sim->add_option("--cases", s.cases, "Number of cases")->required();
    sim->add_option("--start-at", s.start_at, "Start instant, YYYY-MM-DDTHH:MM:SS");
    sim->add_option("--seed", s.seed, "Random seed");
    sim->add_option("--max-events", s.max_events, "Events per case before it is aborted");
    sim->add_option("--out-log", s.out_log, "Simulated log CSV (default stdout)");
    sim->add_option("--out-kpis", s.out_kpis, "KPI JSON output");
    sim->add_option("--out-report", s.out_report, "Run report JSON output");

    EvaluateArgs e;
    auto* eval = app.add_subcommand("evaluate", "Compare simulated logs with a real log");
    eval->add_option("--real", e.real, "Real event log CSV")->required();
    eval->add_option("simulated", e.simulated, "Simulated log CSVs")->required();
    eval->add_option("--format", e.format, "csv or json");
    eval->add_option("--normalization", e.normalization, "normalized or raw");
    eval->add_option("--rhythm", e.rhythm, "absolute-hour or hour-of-week");
    eval->add_option("--out", e.out, "Output file (default stdout)");

    ServiceOptions opts;
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string state_dir;
    std::size_t workers = 0;
    auto* srv = app.add_subcommand("serve", "Run the HTTP service");
    srv->add_option("--port", port, "Port");
    srv->add_option("--host", host, "Bind address");
    srv->add_option("--state-dir", state_dir, "State directory (env BPSIM_STATE_DIR)");
    srv->add_option("--workers", workers, "Simulation worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        return app.exit(err) == 0 ? 0 : 2;
    }

    try {
        if (*discover) return run_discover(d, *discover);
        if (*sim) return run_simulate(s);
        if (*eval) return run_evaluate(e);
        if (*srv) {
            if (state_dir.empty()) {
                const char* env = std::getenv("BPSIM_STATE_DIR");
                state_dir = env ? env : "bpsim-state";
            }
            opts.state_dir = state_dir;
            opts.workers = workers;
            std::cerr << "serving on http://" << host << ":" << port << "/api/v1 (state in " << state_dir << ")\n";
            if (serve(host, port, opts) != 0) {
                std::cerr << "error: cannot bind " << host << ":" << port << "\n";
                return 1;
            }
            return 0;
        }
    } catch (const UsageError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 2;
}
