#include "bpsim/model.hpp"

#include "bpsim/error.hpp"

#include <cmath>
#include <sstream>

namespace bpsim {

namespace {

std::string format_sum(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

const ResourceProfile* DifferentiatedSimModel::find_profile(const std::string& id) const {
    for (const auto& p : profiles)
        if (p.id == id) return &p;
    return nullptr;
}

std::vector<std::string> validate_branching(const ProcessGraph& graph, const BranchingProbabilities& bp) {
    std::vector<std::string> out;
    std::set<std::string> known;
    for (auto g : graph.exclusive_splits()) {
        const auto& node = graph.node(g);
        double sum = 0.0;
        bool complete = true;
        for (auto f : node.outgoing) {
            const auto& fid = graph.flow(f).id;
            known.insert(fid);
            auto it = bp.find(fid);
            if (it == bp.end()) {
                out.push_back("gateway '" + node.id + "' has no probability for flow '" + fid + "'");
                complete = false;
                continue;
            }
            if (!(it->second >= 0.0 && it->second <= 1.0))
                out.push_back("flow '" + fid + "' probability " + format_sum(it->second) + " outside [0,1]");
            sum += it->second;
        }
        if (complete && std::abs(sum - 1.0) > kProbabilityTolerance)
            out.push_back("gateway '" + node.id + "' probabilities sum " + format_sum(sum));
    }
    for (const auto& [fid, p] : bp)
        if (!known.contains(fid)) out.push_back("probability given for flow '" + fid + "' that leaves no exclusive split");
    return out;
}

std::vector<std::string> validate_model(const DifferentiatedSimModel& model) {
    std::vector<std::string> out = model.graph.violations();

    std::set<std::string> ids;
    std::set<std::string> allocated;
    for (const auto& p : model.profiles) {
        if (p.id.empty()) out.push_back("resource profile with empty id");
        if (!ids.insert(p.id).second) out.push_back("duplicate resource profile '" + p.id + "'");
        if (p.avail.empty()) out.push_back("resource '" + p.id + "' has an empty calendar");
        if (p.cost_per_hour < 0) out.push_back("resource '" + p.id + "' has negative cost");
        for (const auto& a : p.alloc) {
            if (!model.graph.find_task(a)) out.push_back("resource '" + p.id + "' allocated to unknown activity '" + a + "'");
            if (!p.perf.contains(a)) out.push_back("resource '" + p.id + "' has no performance for activity '" + a + "'");
            allocated.insert(a);
        }
        for (const auto& [a, d] : p.perf) {
            if (!p.alloc.contains(a)) out.push_back("resource '" + p.id + "' has performance for unallocated activity '" + a + "'");
            if (auto problem = check_distribution(d))
                out.push_back("resource '" + p.id + "' activity '" + a + "': " + *problem);
        }
    }
    for (const auto& label : model.graph.activity_labels())
        if (!allocated.contains(label)) out.push_back("unallocated activity '" + label + "'");

    auto bp = validate_branching(model.graph, model.bp);
    out.insert(out.end(), bp.begin(), bp.end());
    if (auto problem = check_distribution(model.arrival)) out.push_back("arrival distribution: " + *problem);
    if (model.arrival_calendar.empty()) out.push_back("arrival calendar is empty");
    return out;
}

std::vector<std::string> validate_model(const ClassicSimModel& model) {
    std::vector<std::string> out = model.graph.violations();
    std::set<std::string> ids;
    for (const auto& p : model.pools) {
        if (!ids.insert(p.id).second) out.push_back("duplicate resource pool '" + p.id + "'");
        if (p.size < 1) out.push_back("pool '" + p.id + "' has size " + std::to_string(p.size));
        if (p.avail.empty()) out.push_back("pool '" + p.id + "' has an empty calendar");
    }
    for (const auto& label : model.graph.activity_labels()) {
        auto it = model.alloc.find(label);
        if (it == model.alloc.end())
            out.push_back("unallocated activity '" + label + "'");
        else if (!ids.contains(it->second))
            out.push_back("activity '" + label + "' allocated to unknown pool '" + it->second + "'");
        auto pt = model.pt.find(label);
        if (pt == model.pt.end())
            out.push_back("activity '" + label + "' has no processing time distribution");
        else if (auto problem = check_distribution(pt->second))
            out.push_back("activity '" + label + "': " + *problem);
    }
    for (const auto& [label, pool] : model.alloc)
        if (!model.graph.find_task(label)) out.push_back("allocation of unknown activity '" + label + "'");
    auto bp = validate_branching(model.graph, model.bp);
    out.insert(out.end(), bp.begin(), bp.end());
    if (auto problem = check_distribution(model.arrival)) out.push_back("arrival distribution: " + *problem);
    if (model.arrival_calendar.empty()) out.push_back("arrival calendar is empty");
    return out;
}

void require_valid(const DifferentiatedSimModel& model) {
    auto v = validate_model(model);
    if (v.empty()) return;
    std::string msg = "invalid simulation model:";
    for (const auto& s : v) msg += "\n  - " + s;
    throw ValidationError(msg);
}

DifferentiatedSimModel classic_to_differentiated(const ClassicSimModel& model) {
    auto problems = validate_model(model);
    if (!problems.empty()) {
        std::string msg = "invalid classic model:";
        for (const auto& s : problems) msg += "\n  - " + s;
        throw ValidationError(msg);
    }
    DifferentiatedSimModel out;
    out.graph = model.graph;
    out.bp = model.bp;
    out.arrival = model.arrival;
    out.arrival_calendar = model.arrival_calendar;
    for (const auto& pool : model.pools) {
        ResourceProfile base;
        base.avail = pool.avail;
        base.cost_per_hour = pool.cost_per_hour;
        for (const auto& [label, pid] : model.alloc) {
            if (pid != pool.id) continue;
            base.alloc.insert(label);
            base.perf.emplace(label, model.pt.at(label));
        }
        for (int k = 1; k <= pool.size; ++k) {
            ResourceProfile p = base;
            p.id = pool.id + "_" + std::to_string(k);
            out.profiles.push_back(std::move(p));
        }
    }
    return out;
}

}  // namespace bpsim
