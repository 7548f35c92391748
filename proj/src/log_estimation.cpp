#include "bpsim/log_estimation.hpp"

#include "bpsim/discovery.hpp"
#include "bpsim/error.hpp"
#include "bpsim/fitting.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <optional>

namespace bpsim {

namespace {

// Token replay over the graph with silent gateway firing.
class Replayer {
public:
    Replayer(const ProcessGraph& g) : g_(g), tokens_(g.flows().size(), 0) {}

    void reset() {
        std::fill(tokens_.begin(), tokens_.end(), 0);
        traversals_.clear();
        const auto start = *g_.start_node();
        tokens_[g_.node(start).outgoing.front()] = 1;
    }

    bool fire(std::size_t task) {
        const auto in = g_.node(task).incoming.front();
        if (tokens_[in] == 0) {
            auto path = find_path([in](std::size_t arc) { return arc == in; });
            if (!path) return false;
            apply(*path);
        }
        --tokens_[in];
        ++tokens_[g_.node(task).outgoing.front()];
        return true;
    }

    // Moves leftover tokens toward end events where a gateway path exists.
    void drain() {
        for (int guard = 0; guard < static_cast<int>(tokens_.size()) * 4; ++guard) {
            bool moved = false;
            for (std::size_t a = 0; a < tokens_.size() && !moved; ++a) {
                if (tokens_[a] == 0 || g_.node(g_.flow(a).target).kind == NodeKind::EndEvent) continue;
                auto path = find_path_from(a, [this](std::size_t arc) {
                    return g_.node(g_.flow(arc).target).kind == NodeKind::EndEvent;
                });
                if (path && !path->empty()) {
                    apply(*path);
                    moved = true;
                }
            }
            if (!moved) return;
        }
    }

    const std::map<std::size_t, std::size_t>& traversals() const { return traversals_; }

private:
    static bool is_gateway(NodeKind k) {
        return k == NodeKind::ExclusiveSplit || k == NodeKind::ExclusiveJoin || k == NodeKind::ParallelSplit ||
               k == NodeKind::ParallelJoin;
    }

    // A path is the sequence of arcs from a marked arc to the goal arc.
    template <typename Goal>
    std::optional<std::vector<std::size_t>> find_path(Goal goal) const {
        std::optional<std::vector<std::size_t>> best;
        for (std::size_t a = 0; a < tokens_.size(); ++a) {
            if (tokens_[a] == 0) continue;
            auto p = find_path_from(a, goal);
            if (p && (!best || p->size() < best->size())) best = std::move(p);
        }
        return best;
    }

    template <typename Goal>
    std::optional<std::vector<std::size_t>> find_path_from(std::size_t origin, Goal goal) const {
        std::vector<std::optional<std::size_t>> parent(tokens_.size());
        std::vector<bool> seen(tokens_.size(), false);
        std::deque<std::size_t> queue{origin};
        seen[origin] = true;
        while (!queue.empty()) {
            const auto arc = queue.front();
            queue.pop_front();
            if (goal(arc)) {
                std::vector<std::size_t> path{arc};
                for (auto cur = arc; parent[cur]; cur = *parent[cur]) path.push_back(*parent[cur]);
                std::reverse(path.begin(), path.end());
                return path;
            }
            const auto& node = g_.node(g_.flow(arc).target);
            if (!is_gateway(node.kind)) continue;
            if (node.kind == NodeKind::ParallelJoin) {
                bool ready = std::all_of(node.incoming.begin(), node.incoming.end(),
                                         [&](std::size_t in) { return in == arc || tokens_[in] > 0; });
                if (!ready) continue;
            }
            for (auto next : node.outgoing) {
                if (seen[next]) continue;
                seen[next] = true;
                parent[next] = arc;
                queue.push_back(next);
            }
        }
        return std::nullopt;
    }

    void apply(const std::vector<std::size_t>& path) {
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            const auto from = path[i];
            const auto to = path[i + 1];
            const auto gw = g_.flow(from).target;
            const auto& node = g_.node(gw);
            --tokens_[from];
            switch (node.kind) {
                case NodeKind::ParallelSplit:
                    for (auto out : node.outgoing) ++tokens_[out];
                    break;
                case NodeKind::ParallelJoin:
                    for (auto in : node.incoming)
                        if (in != from) --tokens_[in];
                    ++tokens_[to];
                    break;
                case NodeKind::ExclusiveSplit:
                    ++traversals_[to];
                    ++tokens_[to];
                    break;
                default:
                    ++tokens_[to];
            }
        }
    }

    const ProcessGraph& g_;
    std::vector<int> tokens_;
    std::map<std::size_t, std::size_t> traversals_;  // outgoing arc of an exclusive split -> count
};

}  // namespace

BranchingEstimate estimate_branching(const EventLog& log, const ProcessGraph& graph) {
    if (!graph.start_node()) throw ValidationError("graph has no start event");
    std::map<std::size_t, std::size_t> counts;
    BranchingEstimate est;
    Replayer replay(graph);
    for (const auto& trace : log.traces) {
        replay.reset();
        bool ok = true;
        for (const auto& e : trace.events) {
            auto task = graph.find_task(e.activity);
            if (!task) throw ValidationError("activity '" + e.activity + "' in log is not in the process model");
            if (!replay.fire(*task)) {
                ok = false;
                break;
            }
        }
        if (!ok) {
            ++est.skipped;
            est.skipped_cases.push_back(trace.case_id);
            continue;
        }
        replay.drain();
        ++est.replayed;
        for (const auto& [arc, c] : replay.traversals()) counts[arc] += c;
    }
    for (auto gw : graph.exclusive_splits()) {
        const auto& node = graph.node(gw);
        std::size_t total = 0;
        for (auto out : node.outgoing) total += counts[out];
        if (total == 0) est.unreached_gateways.push_back(node.id);
        for (auto out : node.outgoing) {
            const double p = total == 0 ? 1.0 / static_cast<double>(node.outgoing.size())
                                        : static_cast<double>(counts[out]) / static_cast<double>(total);
            est.probabilities[graph.flow(out).id] = p;
        }
    }
    return est;
}

ArrivalEstimate estimate_interarrival(const EventLog& log, int granule_minutes, double min_support,
                                      double min_confidence) {
    if (log.traces.size() < 2) throw UsageError("inter-arrival estimation needs at least 2 traces");
    std::vector<Timestamp> starts;
    for (const auto& t : log.traces) starts.push_back(t.first_start());
    std::sort(starts.begin(), starts.end());
    ArrivalEstimate est;
    auto omega = extract_candidates(starts, granule_minutes, "case-arrival");
    est.calendar = discover_calendar(omega, min_support, min_confidence);
    if (est.calendar.empty()) est.calendar = WeeklyCalendar::always();

    // Gaps count only seconds inside the arrival calendar. The simulator
    // skips closed periods by itself, so raw gaps would count nights and
    // weekends twice.
    std::vector<double> gaps;
    for (std::size_t i = 1; i < starts.size(); ++i)
        gaps.push_back(static_cast<double>(in_calendar_duration(est.calendar, starts[i - 1], starts[i])));

    est.distribution = gaps.size() == 1 ? DistributionSpec::fixed(gaps.front()) : best_fitted_distribution(gaps).spec;
    if (est.distribution.family != DistributionFamily::Fixed && est.distribution.mean() <= 0)
        est.distribution = DistributionSpec::fixed(0);
    return est;
}

}  // namespace bpsim
