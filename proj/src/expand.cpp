#include "trailgen/expand.hpp"

#include <algorithm>
#include <deque>
#include <random>
#include <set>

namespace trailgen {

EdgeRef EdgeRef::from_json(const json& j) {
    if (!j.is_array() || j.size() != 3) throw data_error("edge ref must be a [src, relation, dst] triple");
    return EdgeRef{j[0].get<std::string>(), j[1].get<std::string>(), j[2].get<std::string>()};
}

bool Subgraph::contains(const NodeId& id) const {
    return std::find(node_ids.begin(), node_ids.end(), id) != node_ids.end();
}

json Subgraph::to_json() const {
    json j;
    j["seed"] = seed;
    j["node_ids"] = node_ids;
    json es = json::array();
    for (const EdgeRef& e : edges) es.push_back(e.to_json());
    j["edges"] = es;
    j["budget_used"] = budget_used;
    return j;
}

Subgraph Subgraph::from_json(const json& j) {
    Subgraph s;
    s.seed = j.at("seed").get<std::string>();
    s.node_ids = j.at("node_ids").get<std::vector<std::string>>();
    for (const auto& e : j.at("edges")) s.edges.push_back(EdgeRef::from_json(e));
    s.budget_used = j.at("budget_used").get<size_t>();
    return s;
}

ExpandStrategy parse_strategy(const std::string& name) {
    if (name == "frontier_bfs") return ExpandStrategy::frontier_bfs;
    if (name == "random_frontier") return ExpandStrategy::random_frontier;
    throw config_error("unknown expansion strategy '" + name + "'");
}

std::string strategy_name(ExpandStrategy s) {
    return s == ExpandStrategy::frontier_bfs ? "frontier_bfs" : "random_frontier";
}

namespace {

// BFS with neighbors visited in NodeId order. The visit sequence does not
// depend on the budget, which gives the monotone-growth guarantee.
std::vector<NodeId> select_bfs(const KnowledgeGraph& graph, const NodeId& seed, size_t budget) {
    std::vector<NodeId> selected{seed};
    std::set<NodeId> visited{seed};
    std::deque<NodeId> queue{seed};
    while (!queue.empty() && selected.size() < budget) {
        NodeId u = queue.front();
        queue.pop_front();
        for (const NodeId& v : graph.neighbors(u)) {
            if (visited.count(v)) continue;
            visited.insert(v);
            selected.push_back(v);
            queue.push_back(v);
            if (selected.size() >= budget) break;
        }
    }
    return selected;
}

std::vector<NodeId> select_random_frontier(const KnowledgeGraph& graph, const NodeId& seed,
                                           size_t budget, std::uint64_t rng_seed) {
    std::mt19937_64 rng(rng_seed);
    std::vector<NodeId> selected{seed};
    std::set<NodeId> in_selected{seed};
    std::set<NodeId> frontier;
    for (const NodeId& v : graph.neighbors(seed)) frontier.insert(v);

    while (selected.size() < budget && !frontier.empty()) {
        // std::set iteration is sorted, so indexing it is deterministic.
        size_t idx = std::uniform_int_distribution<size_t>(0, frontier.size() - 1)(rng);
        auto it = frontier.begin();
        std::advance(it, idx);
        NodeId pick = *it;
        frontier.erase(it);
        selected.push_back(pick);
        in_selected.insert(pick);
        for (const NodeId& v : graph.neighbors(pick)) {
            if (!in_selected.count(v)) frontier.insert(v);
        }
    }
    return selected;
}

}  // namespace

Subgraph expand(const KnowledgeGraph& graph, const NodeId& seed, size_t budget,
                ExpandStrategy strategy, std::uint64_t rng_seed) {
    if (!graph.has_node(seed)) throw data_error("unknown seed node '" + seed + "'");
    if (budget < 1) throw config_error("expansion budget must be >= 1");

    std::vector<NodeId> selected = strategy == ExpandStrategy::frontier_bfs
                                       ? select_bfs(graph, seed, budget)
                                       : select_random_frontier(graph, seed, budget, rng_seed);

    Subgraph sub;
    sub.seed = seed;
    sub.node_ids = std::move(selected);
    for (const Edge& e : graph.induced_edges(sub.node_ids)) {
        sub.edges.push_back(EdgeRef{e.src, e.relation, e.dst});
    }
    sub.budget_used = sub.node_ids.size();
    return sub;
}

}  // namespace trailgen
