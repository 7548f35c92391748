#include "bpsim/simulator.hpp"

#include "bpsim/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>

namespace bpsim {

nlohmann::json to_json(const RunReport& r) {
    return {{"cases_requested", r.requested},
            {"cases_completed", r.completed},
            {"cases_aborted", r.aborted},
            {"events", r.events},
            {"seed", r.seed},
            {"wall_clock_seconds", r.wall_clock_seconds},
            {"aborted_cases", r.aborted_cases}};
}

std::vector<Timestamp> generate_arrivals(const DifferentiatedSimModel& model, const SimConfig& config, Rng& rng) {
    if (model.arrival_calendar.empty()) throw ValidationError("arrival calendar is empty");
    std::vector<Timestamp> out;
    out.reserve(config.cases);
    if (config.cases == 0) return out;
    Timestamp t = next_available(model.arrival_calendar, config.start_at);
    out.push_back(t);
    for (std::size_t i = 1; i < config.cases; ++i) {
        const auto gap = static_cast<Seconds>(std::llround(sample(model.arrival, rng)));
        t = next_available(model.arrival_calendar, t + gap);
        out.push_back(t);
    }
    return out;
}

DiffResourceQueue::DiffResourceQueue(const std::vector<ResourceProfile>& profiles) {
    for (const auto& p : profiles) ids_.push_back(p.id);
    ready_at_.assign(profiles.size(), 0);
    for (std::size_t i = 0; i < profiles.size(); ++i)
        for (const auto& a : profiles[i].alloc) views_[a].push_back(i);
    for (auto& [a, v] : views_)
        std::sort(v.begin(), v.end(), [this](std::size_t x, std::size_t y) { return ids_[x] < ids_[y]; });
}

const std::vector<std::size_t>& DiffResourceQueue::view(const std::string& activity) const {
    static const std::vector<std::size_t> none;
    auto it = views_.find(activity);
    return it == views_.end() ? none : it->second;
}

std::size_t DiffResourceQueue::pop(const std::string& activity) const {
    const auto& v = view(activity);
    if (v.empty()) throw ValidationError("no resource allocated to activity '" + activity + "'");
    std::size_t best = v.front();
    for (auto r : v)
        if (ready_at_[r] < ready_at_[best]) best = r;
    return best;
}

bool CaseState::finished() const {
    return active == 0 && std::all_of(tokens.begin(), tokens.end(), [](int t) { return t == 0; });
}

TokenGame::TokenGame(const ProcessGraph& graph, const BranchingProbabilities& bp)
    : graph_(graph), probability_(graph.flows().size(), 0.0) {
    for (std::size_t f = 0; f < graph.flows().size(); ++f) {
        auto it = bp.find(graph.flow(f).id);
        if (it != bp.end()) probability_[f] = it->second;
    }
}

CaseState TokenGame::new_case() const {
    CaseState s;
    s.tokens.assign(graph_.flows().size(), 0);
    return s;
}

std::vector<std::size_t> TokenGame::start(CaseState& state, Rng& rng) const {
    const auto start = graph_.start_node();
    if (!start) throw ValidationError("graph has no start event");
    const auto out = graph_.node(*start).outgoing.front();
    ++state.tokens[out];
    return propagate(state, {out}, rng);
}

std::vector<std::size_t> TokenGame::complete(CaseState& state, std::size_t task, Rng& rng) const {
    --state.active;
    const auto out = graph_.node(task).outgoing.front();
    ++state.tokens[out];
    return propagate(state, {out}, rng);
}

std::vector<std::size_t> TokenGame::propagate(CaseState& state, std::vector<std::size_t> marked, Rng& rng) const {
    std::vector<std::size_t> enabled;
    std::size_t next = 0;
    while (next < marked.size()) {
        const auto arc = marked[next++];
        if (state.tokens[arc] == 0) continue;
        const auto target = graph_.flow(arc).target;
        const auto& node = graph_.node(target);
        switch (node.kind) {
            case NodeKind::Task:
                --state.tokens[arc];
                ++state.active;
                enabled.push_back(target);
                break;
            case NodeKind::EndEvent:
                --state.tokens[arc];
                break;
            case NodeKind::ExclusiveSplit: {
                --state.tokens[arc];
                const double u = rng.uniform01();
                double acc = 0.0;
                std::size_t chosen = node.outgoing.back();
                for (auto out : node.outgoing) {
                    acc += probability_[out];
                    if (u < acc) {
                        chosen = out;
                        break;
                    }
                }
                ++state.tokens[chosen];
                marked.push_back(chosen);
                break;
            }
            case NodeKind::ExclusiveJoin:
                --state.tokens[arc];
                ++state.tokens[node.outgoing.front()];
                marked.push_back(node.outgoing.front());
                break;
            case NodeKind::ParallelSplit:
                --state.tokens[arc];
                for (auto out : node.outgoing) {
                    ++state.tokens[out];
                    marked.push_back(out);
                }
                break;
            case NodeKind::ParallelJoin: {
                const bool ready = std::all_of(node.incoming.begin(), node.incoming.end(),
                                               [&](std::size_t in) { return state.tokens[in] > 0; });
                if (!ready) break;  // token parked until the remaining branches arrive
                for (auto in : node.incoming) --state.tokens[in];
                ++state.tokens[node.outgoing.front()];
                marked.push_back(node.outgoing.front());
                break;
            }
            case NodeKind::StartEvent:
                throw ValidationError("flow into start event '" + node.id + "'");
        }
    }
    return enabled;
}

namespace {

struct QueuedEvent {
    Timestamp enabled = 0;
    std::size_t case_index = 0;
    std::string label;        // empty for the start pseudo-event
    std::uint64_t seq = 0;
    std::size_t node = 0;
    bool is_start = false;
};

struct LaterFirst {
    bool operator()(const QueuedEvent& a, const QueuedEvent& b) const {
        if (a.enabled != b.enabled) return a.enabled > b.enabled;
        if (a.case_index != b.case_index) return a.case_index > b.case_index;
        if (a.label != b.label) return a.label > b.label;
        return a.seq > b.seq;
    }
};

struct Executed {
    std::size_t resource = 0;
    std::string activity;
    Timestamp enabled = 0;
    Timestamp start = 0;
    Timestamp complete = 0;
    Seconds ideal = 0;
};

struct CaseRecord {
    CaseState state;
    std::vector<Executed> events;
    bool aborted = false;
    bool completed = false;
    Timestamp first_start = 0;
    Timestamp last_complete = 0;
};

}  // namespace

SimulationResult simulate(const DifferentiatedSimModel& model, const SimConfig& config) {
    const auto clock_begin = std::chrono::steady_clock::now();
    if (config.cases == 0) throw UsageError("number of cases must be at least 1");
    if (config.max_events_per_case == 0) throw UsageError("max events per case must be at least 1");
    require_valid(model);

    const auto& profiles = model.profiles;
    Rng rng(config.seed);
    DiffResourceQueue resources(profiles);
    for (std::size_t r = 0; r < profiles.size(); ++r)
        resources.set_ready_at(r, next_available(profiles[r].avail, config.start_at));

    TokenGame game(model.graph, model.bp);
    const auto arrivals = generate_arrivals(model, config, rng);

    std::vector<CaseRecord> cases(arrivals.size());
    std::priority_queue<QueuedEvent, std::vector<QueuedEvent>, LaterFirst> queue;
    std::uint64_t seq = 0;
    for (std::size_t c = 0; c < arrivals.size(); ++c) {
        cases[c].state = game.new_case();
        queue.push({arrivals[c], c, std::string{}, seq++, 0, true});
    }

    auto enqueue = [&](std::size_t c, Timestamp t, const std::vector<std::size_t>& enabled) {
        for (auto node : enabled) queue.push({t, c, model.graph.node(node).label, seq++, node, false});
    };

    while (!queue.empty()) {
        QueuedEvent ev = queue.top();
        queue.pop();
        auto& rec = cases[ev.case_index];
        if (rec.aborted) continue;

        if (ev.is_start) {
            enqueue(ev.case_index, ev.enabled, game.start(rec.state, rng));
        } else {
            if (rec.events.size() >= config.max_events_per_case) {
                rec.aborted = true;
                continue;
            }
            const std::size_t r = resources.pop(ev.label);
            const auto& profile = profiles[r];
            Executed ex;
            ex.resource = r;
            ex.activity = ev.label;
            ex.enabled = ev.enabled;
            ex.start = next_available(profile.avail, std::max(ev.enabled, resources.ready_at(r)));
            ex.ideal = static_cast<Seconds>(std::llround(sample(profile.perf.at(ev.label), rng)));
            ex.complete = idle_processing_completion(profile.avail, ex.start, ex.ideal);
            resources.set_ready_at(r, next_available(profile.avail, ex.complete));

            if (rec.events.empty()) {
                rec.first_start = ex.start;
                rec.last_complete = ex.complete;
            }
            rec.first_start = std::min(rec.first_start, ex.start);
            rec.last_complete = std::max(rec.last_complete, ex.complete);
            const Timestamp done = ex.complete;
            rec.events.push_back(std::move(ex));
            enqueue(ev.case_index, done, game.complete(rec.state, ev.node, rng));
        }
        if (!rec.aborted && rec.state.finished()) rec.completed = true;
    }

    SimulationResult result;
    auto& report = result.report;
    report.requested = config.cases;
    report.seed = config.seed;

    // Internal statistics, accumulated independently of compute_kpis.
    auto& kpis = result.kpis;
    std::vector<Seconds> busy(profiles.size(), 0);
    bool any = false;
    Timestamp span_begin = 0;
    Timestamp span_end = 0;

    for (std::size_t c = 0; c < cases.size(); ++c) {
        auto& rec = cases[c];
        const std::string case_id = std::to_string(c + 1);
        if (!rec.completed || rec.events.empty()) {
            if (rec.completed) {
                ++report.completed;  // empty process: nothing to log
                continue;
            }
            ++report.aborted;
            report.aborted_cases.push_back(case_id);
            continue;
        }
        ++report.completed;
        std::stable_sort(rec.events.begin(), rec.events.end(), [](const Executed& a, const Executed& b) {
            if (a.start != b.start) return a.start < b.start;
            if (a.complete != b.complete) return a.complete < b.complete;
            return a.activity < b.activity;
        });
        Trace trace;
        trace.case_id = case_id;
        for (const auto& ex : rec.events) {
            trace.events.push_back({case_id, ex.activity, profiles[ex.resource].id, ex.enabled, ex.start, ex.complete});
            kpis.waiting_times.push_back(ex.start - ex.enabled);
            kpis.processing_times.push_back(ex.complete - ex.start);
            busy[ex.resource] += ex.ideal;
            ++report.events;
        }
        kpis.cycle_times.emplace_back(case_id, rec.last_complete - rec.first_start);
        if (!any) {
            span_begin = rec.first_start;
            span_end = rec.last_complete;
            any = true;
        }
        span_begin = std::min(span_begin, rec.first_start);
        span_end = std::max(span_end, rec.last_complete);
        result.log.traces.push_back(std::move(trace));
    }
    if (any) {
        for (std::size_t r = 0; r < profiles.size(); ++r) {
            const Seconds available = in_calendar_duration(profiles[r].avail, span_begin, span_end);
            const double u = available > 0 ? static_cast<double>(busy[r]) / static_cast<double>(available) : 0.0;
            kpis.utilization[profiles[r].id] = std::clamp(u, 0.0, 1.0);
        }
    }
    finalize_kpis(kpis);

    report.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_begin).count();
    return result;
}

SimulationResult simulate(const ClassicSimModel& model, const SimConfig& config) {
    return simulate(classic_to_differentiated(model), config);
}

}  // namespace bpsim
