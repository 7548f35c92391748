#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bpsim {

enum class NodeKind { StartEvent, EndEvent, Task, ExclusiveSplit, ExclusiveJoin, ParallelSplit, ParallelJoin };

std::string_view node_kind_name(NodeKind k);

struct Node {
    std::string id;
    NodeKind kind = NodeKind::Task;
    std::string label;  // tasks only
    std::vector<std::size_t> incoming;  // flow indices
    std::vector<std::size_t> outgoing;
};

struct Flow {
    std::string id;
    std::size_t source = 0;
    std::size_t target = 0;
};

/// BPMN control-flow skeleton: events, tasks, gateways and sequence flows.
/// Immutable once built; construct through GraphBuilder.
class ProcessGraph {
public:
    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Flow>& flows() const { return flows_; }
    const Node& node(std::size_t i) const { return nodes_[i]; }
    const Flow& flow(std::size_t i) const { return flows_[i]; }

    std::optional<std::size_t> find_node(const std::string& id) const;
    std::optional<std::size_t> find_flow(const std::string& id) const;
    std::optional<std::size_t> find_task(const std::string& label) const;

    /// Task labels in node order.
    std::vector<std::string> activity_labels() const;
    std::vector<std::size_t> exclusive_splits() const;
    std::optional<std::size_t> start_node() const;

    /// Structural invariant violations; empty for a well-formed graph.
    std::vector<std::string> violations() const;

    friend bool operator==(const ProcessGraph& a, const ProcessGraph& b);

private:
    friend class GraphBuilder;
    std::vector<Node> nodes_;
    std::vector<Flow> flows_;
    std::map<std::string, std::size_t> node_index_;
    std::map<std::string, std::size_t> flow_index_;
    std::map<std::string, std::size_t> task_index_;
};

/// Collects nodes and flows in any order; build() resolves references and
/// classifies each gateway as split or join from its arc counts.
class GraphBuilder {
public:
    GraphBuilder& start(std::string id);
    GraphBuilder& end(std::string id);
    GraphBuilder& task(std::string id, std::string label);
    GraphBuilder& exclusive_gateway(std::string id);
    GraphBuilder& parallel_gateway(std::string id);
    GraphBuilder& flow(std::string id, std::string source, std::string target);

    /// Throws ValidationError on duplicate ids or labels, dangling flow
    /// references, or gateways that both split and join.
    ProcessGraph build() const;

private:
    enum class Pending { Start, End, Task, Exclusive, Parallel };
    struct PendingNode {
        std::string id;
        Pending kind;
        std::string label;
    };
    struct PendingFlow {
        std::string id, source, target;
    };
    std::vector<PendingNode> nodes_;
    std::vector<PendingFlow> flows_;
};

/// start -> t1 -> ... -> tn -> end, with task ids equal to labels.
ProcessGraph sequential_graph(const std::vector<std::string>& labels);

}  // namespace bpsim
