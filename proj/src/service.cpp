#include "bpsim/service.hpp"

#include "bpsim/app.hpp"
#include "bpsim/bpmn.hpp"
#include "bpsim/error.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <condition_variable>
#include <cstdio>
#include <deque>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

namespace bpsim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct HttpError : std::runtime_error {
    int status;
    HttpError(int s, const std::string& what) : std::runtime_error(what), status(s) {}
};

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Write-then-rename so a crash never leaves a half-written artifact.
void write_file(const fs::path& p, const std::string& content) {
    fs::create_directories(p.parent_path());
    const auto tmp = p.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp);
        out << content;
    }
    fs::rename(tmp, p);
}

std::string fnv1a_hex(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    try {
        auto j = json::parse(req.body);
        if (!j.is_object()) throw HttpError(400, "request body must be a JSON object");
        return j;
    } catch (const json::parse_error& e) {
        throw HttpError(400, std::string("malformed JSON body: ") + e.what());
    }
}

std::string string_field(const json& body, const char* key, bool required = true) {
    auto it = body.find(key);
    if (it == body.end()) {
        if (required) throw HttpError(400, std::string("missing field '") + key + "'");
        return {};
    }
    if (!it->is_string()) throw HttpError(400, std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
}

struct Scenario {
    std::string id;
    std::string label;
    std::string parent;
    std::string bpmn;
    std::string scenario;  // rendered scenario document
    std::string report;    // discovery report, empty when not discovered
};

enum class RunStatus { Pending, Running, Done, Failed };

std::string_view status_name(RunStatus s) {
    switch (s) {
        case RunStatus::Pending: return "pending";
        case RunStatus::Running: return "running";
        case RunStatus::Done: return "done";
        case RunStatus::Failed: return "failed";
    }
    return "failed";
}

RunStatus parse_status(const std::string& s) {
    if (s == "pending") return RunStatus::Pending;
    if (s == "running") return RunStatus::Running;
    if (s == "done") return RunStatus::Done;
    return RunStatus::Failed;
}

struct Run {
    std::string id;
    std::string scenario_id;
    SimConfig config;
    RunStatus status = RunStatus::Pending;
    std::string error;
};

json run_meta(const Run& r) {
    json j = {{"id", r.id},
              {"scenario_id", r.scenario_id},
              {"cases", r.config.cases},
              {"seed", r.config.seed},
              {"start_at", format_timestamp(r.config.start_at)},
              {"max_events_per_case", r.config.max_events_per_case},
              {"status", status_name(r.status)}};
    if (!r.error.empty()) j["error"] = r.error;
    return j;
}

}  // namespace

struct Service::Impl {
    ServiceOptions options;
    std::mutex mutex;
    std::condition_variable work_cv;
    std::condition_variable idle_cv;
    std::map<std::string, Scenario> scenarios;
    std::map<std::string, Run> runs;
    std::deque<std::string> queue;
    std::size_t busy = 0;
    bool stopping = false;
    std::vector<std::thread> workers;

    fs::path scenario_dir(const std::string& id) const { return options.state_dir / "scenarios" / id; }
    fs::path run_dir(const std::string& id) const { return options.state_dir / "runs" / id; }

    explicit Impl(ServiceOptions o) : options(std::move(o)) {
        fs::create_directories(options.state_dir / "scenarios");
        fs::create_directories(options.state_dir / "runs");
        load();
        std::size_t n = options.workers ? options.workers : std::max(1u, std::thread::hardware_concurrency());
        for (std::size_t i = 0; i < n; ++i) workers.emplace_back([this] { work(); });
    }

    ~Impl() {
        {
            std::lock_guard lock(mutex);
            stopping = true;
        }
        work_cv.notify_all();
        for (auto& t : workers) t.join();
    }

    void load() {
        for (const auto& entry : fs::directory_iterator(options.state_dir / "scenarios")) {
            const auto dir = entry.path();
            if (!fs::exists(dir / "meta.json")) continue;
            const auto meta = json::parse(read_file(dir / "meta.json"));
            Scenario s;
            s.id = meta.at("id").get<std::string>();
            s.label = meta.value("label", "");
            s.parent = meta.value("parent", "");
            s.bpmn = read_file(dir / "model.bpmn");
            s.scenario = read_file(dir / "scenario.json");
            if (fs::exists(dir / "report.json")) s.report = read_file(dir / "report.json");
            scenarios.emplace(s.id, std::move(s));
        }
        for (const auto& entry : fs::directory_iterator(options.state_dir / "runs")) {
            const auto dir = entry.path();
            if (!fs::exists(dir / "run.json")) continue;
            const auto meta = json::parse(read_file(dir / "run.json"));
            Run r;
            r.id = meta.at("id").get<std::string>();
            r.scenario_id = meta.at("scenario_id").get<std::string>();
            r.config.cases = meta.at("cases").get<std::size_t>();
            r.config.seed = meta.at("seed").get<std::uint64_t>();
            r.config.start_at = parse_timestamp(meta.at("start_at").get<std::string>());
            r.config.max_events_per_case = meta.at("max_events_per_case").get<std::size_t>();
            r.status = parse_status(meta.at("status").get<std::string>());
            r.error = meta.value("error", "");
            if (r.status == RunStatus::Pending || r.status == RunStatus::Running) {
                r.status = RunStatus::Pending;
                queue.push_back(r.id);
            }
            runs.emplace(r.id, std::move(r));
        }
        // Creation order is not kept on disk; id order keeps restarts
        // deterministic.
        std::sort(queue.begin(), queue.end());
    }

    void persist(const Scenario& s) {
        const auto dir = scenario_dir(s.id);
        write_file(dir / "model.bpmn", s.bpmn);
        write_file(dir / "scenario.json", s.scenario);
        if (!s.report.empty()) write_file(dir / "report.json", s.report);
        write_file(dir / "meta.json", render({{"id", s.id}, {"label", s.label}, {"parent", s.parent}}));
    }

    void persist(const Run& r) { write_file(run_dir(r.id) / "run.json", render(run_meta(r))); }

    std::string fresh_id(const std::string& seed_text, bool for_run) {
        for (std::size_t nonce = for_run ? runs.size() : scenarios.size();; ++nonce) {
            auto id = fnv1a_hex(seed_text + "\n" + std::to_string(nonce));
            if (for_run ? !runs.count(id) : !scenarios.count(id)) return id;
        }
    }

    // Caller holds the lock.
    std::string add_scenario(Scenario s) {
        s.id = fresh_id(s.bpmn + s.scenario + s.parent + s.label, false);
        persist(s);
        auto id = s.id;
        scenarios.emplace(id, std::move(s));
        return id;
    }

    Scenario& scenario_or_404(const std::string& id) {
        auto it = scenarios.find(id);
        if (it == scenarios.end()) throw HttpError(404, "unknown scenario '" + id + "'");
        return it->second;
    }

    Run& run_or_404(const std::string& id) {
        auto it = runs.find(id);
        if (it == runs.end()) throw HttpError(404, "unknown run '" + id + "'");
        return it->second;
    }

    bool has_active_runs(const std::string& scenario_id) const {
        for (const auto& [id, r] : runs)
            if (r.scenario_id == scenario_id && (r.status == RunStatus::Pending || r.status == RunStatus::Running))
                return true;
        return false;
    }

    json scenario_view(const Scenario& s) const {
        json j = {{"id", s.id},
                  {"label", s.label},
                  {"parent", s.parent.empty() ? json(nullptr) : json(s.parent)},
                  {"bpmn", s.bpmn},
                  {"scenario", json::parse(s.scenario)}};
        j["report"] = s.report.empty() ? json(nullptr) : json::parse(s.report);
        return j;
    }

    json run_view(const Run& r) const {
        json j = run_meta(r);
        if (r.status == RunStatus::Done) {
            j["kpis"] = json::parse(read_file(run_dir(r.id) / "kpis.json"));
            j["report"] = json::parse(read_file(run_dir(r.id) / "report.json"));
        }
        return j;
    }

    void work() {
        for (;;) {
            Run job;
            Scenario snapshot;
            {
                std::unique_lock lock(mutex);
                work_cv.wait(lock, [this] { return stopping || !queue.empty(); });
                if (stopping) return;
                auto& run = runs.at(queue.front());
                queue.pop_front();
                ++busy;
                run.status = RunStatus::Running;
                persist(run);
                job = run;
                auto it = scenarios.find(run.scenario_id);
                if (it != scenarios.end()) snapshot = it->second;
            }
            std::string error;
            try {
                if (snapshot.id.empty()) throw Error("scenario '" + job.scenario_id + "' is missing");
                const auto bundle = load_bundle(snapshot.bpmn, snapshot.scenario);
                const auto out = run_simulation(bundle, job.config);
                const auto dir = run_dir(job.id);
                write_file(dir / "log.csv", out.log);
                write_file(dir / "kpis.json", out.kpis);
                write_file(dir / "report.json", out.report);
            } catch (const std::exception& e) {
                error = e.what();
            }
            {
                std::lock_guard lock(mutex);
                auto& run = runs.at(job.id);
                run.status = error.empty() ? RunStatus::Done : RunStatus::Failed;
                run.error = error;
                persist(run);
                --busy;
            }
            idle_cv.notify_all();
        }
    }

    // --- handlers -------------------------------------------------------

    json create_scenario(const json& body) {
        Scenario s;
        s.bpmn = string_field(body, "bpmn");
        s.label = string_field(body, "label", false);
        if (body.contains("log")) {
            DiscoveryParams params;
            if (body.contains("params")) params = params_from_json(body.at("params"));
            std::optional<GridSpec> grid;
            if (body.contains("grid")) grid = grid_from_json(body.at("grid"));
            auto out = run_discovery(string_field(body, "log"), s.bpmn, params, grid);
            s.scenario = std::move(out.scenario);
            s.report = std::move(out.report);
        } else if (body.contains("scenario")) {
            const auto& doc = body.at("scenario");
            const std::string text = doc.is_string() ? doc.get<std::string>() : render(doc);
            const auto bundle = load_bundle(s.bpmn, text);
            s.scenario = store_scenario(bundle.model, bundle.provenance);
        } else {
            throw HttpError(400, "either 'log' or 'scenario' is required");
        }
        std::lock_guard lock(mutex);
        return scenario_view(scenarios.at(add_scenario(std::move(s))));
    }

    json derive(const std::string& id, const json& body) {
        std::lock_guard lock(mutex);
        const auto& parent = scenario_or_404(id);
        Scenario s;
        s.bpmn = parent.bpmn;
        s.scenario = parent.scenario;
        s.parent = parent.id;
        s.label = body.contains("label") ? string_field(body, "label") : parent.label + " (what-if)";
        return scenario_view(scenarios.at(add_scenario(std::move(s))));
    }

    json patch_profile(const std::string& id, const std::string& rid, const json& body) {
        std::lock_guard lock(mutex);
        auto& s = scenario_or_404(id);
        if (has_active_runs(id)) throw HttpError(409, "scenario '" + id + "' has pending or running jobs");
        auto doc = json::parse(s.scenario);
        json* profile = nullptr;
        for (auto& p : doc.at("resource_profiles"))
            if (p.value("id", "") == rid) profile = &p;
        if (!profile) throw HttpError(404, "unknown resource '" + rid + "' in scenario '" + id + "'");
        bool touched = false;
        for (const char* key : {"calendar", "activities", "cost_per_hour"}) {
            if (!body.contains(key)) continue;
            (*profile)[key] = body.at(key);
            touched = true;
        }
        if (!touched) throw HttpError(400, "nothing to change: expected calendar, activities or cost_per_hour");
        const auto text = render(doc);
        const auto bundle = load_bundle(s.bpmn, text);  // 400 on invalid edits
        s.scenario = store_scenario(bundle.model, bundle.provenance);
        persist(s);
        return scenario_view(s);
    }

    json create_run(const json& body) {
        const auto scenario_id = string_field(body, "scenario_id");
        Run r;
        r.scenario_id = scenario_id;
        if (!body.contains("cases") || !body.at("cases").is_number_integer())
            throw HttpError(400, "field 'cases' must be an integer");
        const auto cases = body.at("cases").get<long long>();
        if (cases < 1) throw HttpError(400, "number of cases must be at least 1");
        r.config.cases = static_cast<std::size_t>(cases);
        if (body.contains("seed")) {
            if (!body.at("seed").is_number_unsigned()) throw HttpError(400, "field 'seed' must be a nonnegative integer");
            r.config.seed = body.at("seed").get<std::uint64_t>();
        }
        if (body.contains("max_events_per_case")) {
            const auto m = body.at("max_events_per_case").get<long long>();
            if (m < 1) throw HttpError(400, "max_events_per_case must be at least 1");
            r.config.max_events_per_case = static_cast<std::size_t>(m);
        }
        std::lock_guard lock(mutex);
        const auto& s = scenario_or_404(scenario_id);
        if (body.contains("start_at")) {
            r.config.start_at = parse_timestamp(string_field(body, "start_at"));
        } else {
            auto doc = json::parse(s.scenario);
            r.config.start_at = provenance_start(doc.value("provenance", json::object())).value_or(kDefaultStartAt);
        }
        r.id = fresh_id(scenario_id + render(run_meta(r)), true);
        persist(r);
        queue.push_back(r.id);
        const auto view = run_meta(r);
        runs.emplace(r.id, std::move(r));
        work_cv.notify_one();
        return view;
    }

    std::string run_artifact(const std::string& id, const char* name) {
        std::lock_guard lock(mutex);
        const auto& r = run_or_404(id);
        if (r.status != RunStatus::Done)
            throw HttpError(409, "run '" + id + "' is " + std::string(status_name(r.status)));
        return read_file(run_dir(id) / name);
    }

    std::string evaluate(const json& body, std::string& content_type) {
        const auto real = string_field(body, "real_log");
        if (!body.contains("runs") || !body.at("runs").is_array() || body.at("runs").empty())
            throw HttpError(400, "field 'runs' must be a non-empty array of run ids");
        std::vector<EvaluateInput> inputs;
        for (const auto& id : body.at("runs")) {
            if (!id.is_string()) throw HttpError(400, "run ids must be strings");
            inputs.push_back({id.get<std::string>(), run_artifact(id.get<std::string>(), "log.csv")});
        }
        const auto format = parse_table_format(body.value("format", "json"));
        const auto norm = parse_normalization(body.value("normalization", "normalized"));
        const auto mode = parse_rhythm_mode(body.value("rhythm", "absolute-hour"));
        content_type = format == TableFormat::Csv ? "text/csv" : "application/json";
        return run_evaluation(real, inputs, format, norm, mode);
    }
};

Service::Service(ServiceOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Service::~Service() = default;

void Service::wait_idle() {
    std::unique_lock lock(impl_->mutex);
    impl_->idle_cv.wait(lock, [this] { return impl_->queue.empty() && impl_->busy == 0; });
}

namespace {

using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

void send_json(httplib::Response& res, const json& j, int status = 200) {
    res.status = status;
    res.set_content(render(j), "application/json");
}

Handler guarded(Handler h) {
    return [h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
        try {
            h(req, res);
        } catch (const HttpError& e) {
            send_json(res, {{"error", e.what()}}, e.status);
        } catch (const Error& e) {
            send_json(res, {{"error", e.what()}}, 400);
        } catch (const json::exception& e) {
            send_json(res, {{"error", e.what()}}, 400);
        } catch (const std::exception& e) {
            send_json(res, {{"error", e.what()}}, 500);
        }
    };
}

}  // namespace

void Service::mount(httplib::Server& server) {
    auto* d = impl_.get();
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Methods", "GET, POST, PATCH, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    server.Options(R"(/api/v1/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    const std::string id = "([A-Za-z0-9_-]+)";
    server.Post("/api/v1/scenarios", guarded([d](const auto& req, auto& res) {
                    send_json(res, d->create_scenario(parse_body(req)), 201);
                }));
    server.Get("/api/v1/scenarios", guarded([d](const auto&, auto& res) {
                   std::lock_guard lock(d->mutex);
                   json list = json::array();
                   for (const auto& [sid, s] : d->scenarios)
                       list.push_back({{"id", sid},
                                       {"label", s.label},
                                       {"parent", s.parent.empty() ? json(nullptr) : json(s.parent)}});
                   send_json(res, list);
               }));
    server.Get("/api/v1/scenarios/" + id, guarded([d](const auto& req, auto& res) {
                   std::lock_guard lock(d->mutex);
                   send_json(res, d->scenario_view(d->scenario_or_404(req.matches[1])));
               }));
    server.Get("/api/v1/scenarios/" + id + "/scenario.json", guarded([d](const auto& req, auto& res) {
                   std::lock_guard lock(d->mutex);
                   res.set_content(d->scenario_or_404(req.matches[1]).scenario, "application/json");
               }));
    server.Get("/api/v1/scenarios/" + id + "/report.json", guarded([d](const auto& req, auto& res) {
                   std::lock_guard lock(d->mutex);
                   const auto& s = d->scenario_or_404(req.matches[1]);
                   if (s.report.empty()) throw HttpError(404, "scenario has no discovery report");
                   res.set_content(s.report, "application/json");
               }));
    server.Post("/api/v1/scenarios/" + id + "/derive", guarded([d](const auto& req, auto& res) {
                    send_json(res, d->derive(req.matches[1], parse_body(req)), 201);
                }));
    server.Patch("/api/v1/scenarios/" + id + "/profiles/([^/]+)", guarded([d](const auto& req, auto& res) {
                     send_json(res, d->patch_profile(req.matches[1], req.matches[2], parse_body(req)));
                 }));
    server.Post("/api/v1/runs", guarded([d](const auto& req, auto& res) {
                    send_json(res, d->create_run(parse_body(req)), 202);
                }));
    server.Get("/api/v1/runs/" + id, guarded([d](const auto& req, auto& res) {
                   std::lock_guard lock(d->mutex);
                   send_json(res, d->run_view(d->run_or_404(req.matches[1])));
               }));
    server.Get("/api/v1/runs/" + id + "/log", guarded([d](const auto& req, auto& res) {
                   res.set_content(d->run_artifact(req.matches[1], "log.csv"), "text/csv");
               }));
    server.Get("/api/v1/runs/" + id + "/kpis", guarded([d](const auto& req, auto& res) {
                   res.set_content(d->run_artifact(req.matches[1], "kpis.json"), "application/json");
               }));
    server.Get("/api/v1/runs/" + id + "/report", guarded([d](const auto& req, auto& res) {
                   res.set_content(d->run_artifact(req.matches[1], "report.json"), "application/json");
               }));
    server.Post("/api/v1/evaluate", guarded([d](const auto& req, auto& res) {
                    std::string type;
                    auto body = d->evaluate(parse_body(req), type);
                    res.set_content(body, type);
                }));
    // Unmatched routes get a JSON 404 too.
    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (res.body.empty()) send_json(res, {{"error", "not found"}}, res.status);
    });
}

int serve(const std::string& host, int port, ServiceOptions options) {
    httplib::Server server;
    Service service(std::move(options));
    service.mount(server);
    if (!server.bind_to_port(host, port)) return 1;
    server.listen_after_bind();
    return 0;
}

}  // namespace bpsim
