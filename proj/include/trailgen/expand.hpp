#pragma once

#include <cstdint>

#include "trailgen/graph.hpp"

namespace trailgen {

// Induced edges are identified by their (src, relation, dst) triple, which is
// unique per graph; qualifiers stay on the parent graph.
struct EdgeRef {
    NodeId src;
    std::string relation;
    NodeId dst;

    auto operator<=>(const EdgeRef&) const = default;

    json to_json() const { return json::array({src, relation, dst}); }
    static EdgeRef from_json(const json& j);
};

struct Subgraph {
    NodeId seed;
    std::vector<NodeId> node_ids;  // selection order, seed first
    std::vector<EdgeRef> edges;    // induced, (src, relation, dst) order
    size_t budget_used = 0;

    bool contains(const NodeId& id) const;

    json to_json() const;
    static Subgraph from_json(const json& j);
    std::string serialize() const { return to_json().dump(); }
};

enum class ExpandStrategy {
    frontier_bfs,     // deterministic, NodeId tie-break; monotone in the budget
    random_frontier,  // seeded uniform sampling over the frontier
};

ExpandStrategy parse_strategy(const std::string& name);
std::string strategy_name(ExpandStrategy s);

// Grows a weakly-connected neighborhood of `seed` up to `budget` nodes
// (seed included). Deterministic for fixed (strategy, rng_seed).
Subgraph expand(const KnowledgeGraph& graph, const NodeId& seed, size_t budget,
                ExpandStrategy strategy, std::uint64_t rng_seed);

}  // namespace trailgen
