#include "bpsim/process_graph.hpp"

#include "bpsim/error.hpp"

#include <array>
#include <deque>

namespace bpsim {

std::string_view node_kind_name(NodeKind k) {
    static constexpr std::array<std::string_view, 7> names{
        "startEvent", "endEvent", "task", "exclusive-split", "exclusive-join", "parallel-split", "parallel-join"};
    return names[static_cast<std::size_t>(k)];
}

std::optional<std::size_t> ProcessGraph::find_node(const std::string& id) const {
    auto it = node_index_.find(id);
    if (it == node_index_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> ProcessGraph::find_flow(const std::string& id) const {
    auto it = flow_index_.find(id);
    if (it == flow_index_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> ProcessGraph::find_task(const std::string& label) const {
    auto it = task_index_.find(label);
    if (it == task_index_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::string> ProcessGraph::activity_labels() const {
    std::vector<std::string> out;
    for (const auto& n : nodes_)
        if (n.kind == NodeKind::Task) out.push_back(n.label);
    return out;
}

std::vector<std::size_t> ProcessGraph::exclusive_splits() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (nodes_[i].kind == NodeKind::ExclusiveSplit) out.push_back(i);
    return out;
}

std::optional<std::size_t> ProcessGraph::start_node() const {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        if (nodes_[i].kind == NodeKind::StartEvent) return i;
    return std::nullopt;
}

std::vector<std::string> ProcessGraph::violations() const {
    std::vector<std::string> out;
    std::size_t starts = 0;
    std::size_t ends = 0;
    for (const auto& n : nodes_) {
        const auto in = n.incoming.size();
        const auto outs = n.outgoing.size();
        switch (n.kind) {
            case NodeKind::StartEvent:
                ++starts;
                if (in != 0 || outs != 1) out.push_back("start event '" + n.id + "' needs 0 incoming and 1 outgoing flow");
                break;
            case NodeKind::EndEvent:
                ++ends;
                if (in < 1 || outs != 0) out.push_back("end event '" + n.id + "' needs >=1 incoming and 0 outgoing flows");
                break;
            case NodeKind::Task:
                if (in != 1 || outs != 1)
                    out.push_back("activity '" + n.label + "' needs exactly one incoming and one outgoing flow");
                break;
            case NodeKind::ExclusiveSplit:
            case NodeKind::ParallelSplit:
                if (in != 1 || outs < 2) out.push_back("split gateway '" + n.id + "' needs 1 incoming and >=2 outgoing flows");
                break;
            case NodeKind::ExclusiveJoin:
            case NodeKind::ParallelJoin:
                if (in < 2 || outs != 1) out.push_back("join gateway '" + n.id + "' needs >=2 incoming and 1 outgoing flow");
                break;
        }
    }
    if (starts != 1) out.push_back("graph needs exactly one start event, found " + std::to_string(starts));
    if (ends < 1) out.push_back("graph needs at least one end event");

    if (auto s = start_node()) {
        std::vector<bool> seen(nodes_.size(), false);
        std::deque<std::size_t> queue{*s};
        seen[*s] = true;
        while (!queue.empty()) {
            const auto cur = queue.front();
            queue.pop_front();
            for (auto f : nodes_[cur].outgoing) {
                const auto t = flows_[f].target;
                if (!seen[t]) seen[t] = true, queue.push_back(t);
            }
        }
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            if (!seen[i]) out.push_back("node '" + nodes_[i].id + "' is not reachable from the start event");
    }
    return out;
}

bool operator==(const ProcessGraph& a, const ProcessGraph& b) {
    if (a.nodes_.size() != b.nodes_.size() || a.flows_.size() != b.flows_.size()) return false;
    for (std::size_t i = 0; i < a.nodes_.size(); ++i) {
        const auto& x = a.nodes_[i];
        const auto& y = b.nodes_[i];
        if (x.id != y.id || x.kind != y.kind || x.label != y.label || x.incoming != y.incoming ||
            x.outgoing != y.outgoing)
            return false;
    }
    for (std::size_t i = 0; i < a.flows_.size(); ++i) {
        const auto& x = a.flows_[i];
        const auto& y = b.flows_[i];
        if (x.id != y.id || x.source != y.source || x.target != y.target) return false;
    }
    return true;
}

GraphBuilder& GraphBuilder::start(std::string id) {
    nodes_.push_back({std::move(id), Pending::Start, {}});
    return *this;
}
GraphBuilder& GraphBuilder::end(std::string id) {
    nodes_.push_back({std::move(id), Pending::End, {}});
    return *this;
}
GraphBuilder& GraphBuilder::task(std::string id, std::string label) {
    nodes_.push_back({std::move(id), Pending::Task, std::move(label)});
    return *this;
}
GraphBuilder& GraphBuilder::exclusive_gateway(std::string id) {
    nodes_.push_back({std::move(id), Pending::Exclusive, {}});
    return *this;
}
GraphBuilder& GraphBuilder::parallel_gateway(std::string id) {
    nodes_.push_back({std::move(id), Pending::Parallel, {}});
    return *this;
}
GraphBuilder& GraphBuilder::flow(std::string id, std::string source, std::string target) {
    flows_.push_back({std::move(id), std::move(source), std::move(target)});
    return *this;
}

ProcessGraph GraphBuilder::build() const {
    ProcessGraph g;
    for (const auto& pn : nodes_) {
        if (pn.id.empty()) throw ValidationError("node without id");
        if (!g.node_index_.emplace(pn.id, g.nodes_.size()).second)
            throw ValidationError("duplicate node id '" + pn.id + "'");
        Node n;
        n.id = pn.id;
        n.label = pn.label;
        switch (pn.kind) {
            case Pending::Start: n.kind = NodeKind::StartEvent; break;
            case Pending::End: n.kind = NodeKind::EndEvent; break;
            case Pending::Task:
                n.kind = NodeKind::Task;
                if (n.label.empty()) throw ValidationError("activity '" + pn.id + "' has no label");
                if (!g.task_index_.emplace(n.label, g.nodes_.size()).second)
                    throw ValidationError("duplicate activity label '" + n.label + "'");
                break;
            case Pending::Exclusive: n.kind = NodeKind::ExclusiveSplit; break;
            case Pending::Parallel: n.kind = NodeKind::ParallelSplit; break;
        }
        g.nodes_.push_back(std::move(n));
    }
    for (const auto& pf : flows_) {
        auto s = g.node_index_.find(pf.source);
        auto t = g.node_index_.find(pf.target);
        if (s == g.node_index_.end())
            throw ValidationError("flow '" + pf.id + "' references unknown source '" + pf.source + "'");
        if (t == g.node_index_.end())
            throw ValidationError("flow '" + pf.id + "' references unknown target '" + pf.target + "'");
        if (!g.flow_index_.emplace(pf.id, g.flows_.size()).second)
            throw ValidationError("duplicate flow id '" + pf.id + "'");
        g.nodes_[s->second].outgoing.push_back(g.flows_.size());
        g.nodes_[t->second].incoming.push_back(g.flows_.size());
        g.flows_.push_back({pf.id, s->second, t->second});
    }
    for (std::size_t i = 0; i < g.nodes_.size(); ++i) {
        auto& n = g.nodes_[i];
        const bool gateway = nodes_[i].kind == Pending::Exclusive || nodes_[i].kind == Pending::Parallel;
        if (!gateway) continue;
        const bool exclusive = nodes_[i].kind == Pending::Exclusive;
        const auto in = n.incoming.size();
        const auto out = n.outgoing.size();
        if (in > 1 && out > 1)
            throw ValidationError("gateway '" + n.id + "' both splits and joins (mixed gateways unsupported)");
        if (in > 1)
            n.kind = exclusive ? NodeKind::ExclusiveJoin : NodeKind::ParallelJoin;
        else
            n.kind = exclusive ? NodeKind::ExclusiveSplit : NodeKind::ParallelSplit;
    }
    return g;
}

ProcessGraph sequential_graph(const std::vector<std::string>& labels) {
    GraphBuilder b;
    b.start("start");
    std::string prev = "start";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        b.task(labels[i], labels[i]);
        b.flow("f" + std::to_string(i), prev, labels[i]);
        prev = labels[i];
    }
    b.end("end");
    b.flow("f" + std::to_string(labels.size()), prev, "end");
    return b.build();
}

}  // namespace bpsim
