#pragma once

#include <cstdint>

#include "trailgen/graph.hpp"

namespace trailgen {

// Fixture-generator knobs. Every node gets a globally unique "code" attribute
// plus `attrs_per_node` themed attributes; `alias_prob` nodes also carry an
// "aliases" attribute (pipe-separated alternative labels).
struct RandomGraphSpec {
    size_t nodes = 100;
    double mean_degree = 3.0;
    size_t attrs_per_node = 3;
    bool connected = true;
    double alias_prob = 0.2;
    double qualifier_prob = 0.25;
};

// Deterministic for a fixed (spec, seed). Throws config_error on an
// infeasible spec (nodes < 1, negative degree, or mean degree > nodes - 1).
KnowledgeGraph generate_random_graph(const RandomGraphSpec& spec, std::uint64_t seed);

}  // namespace trailgen
