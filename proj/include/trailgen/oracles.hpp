#pragma once

#include "trailgen/task.hpp"

namespace trailgen {

// Shortest relation path consistent with the task's clues: multi-source BFS
// from every node satisfying the start clue, over edges (either direction)
// whose relation appears in the task's relation path, to any node whose label
// or aliases match the gold answer. A result below the designed length flags
// an unintentionally easy question. Throws data_error when no satisfying
// path exists (broken task).
size_t min_hops_oracle(const KnowledgeGraph& graph, const TaskSpec& task);

struct UniquenessVerdict {
    bool unique = false;
    std::vector<NodeId> witnesses;  // sorted terminal nodes satisfying all constraints
};

// Exhaustive constraint satisfaction over the whole graph: enumerates every
// simple path matching the task's step relations/directions and node clues,
// and collects the distinct terminal nodes.
UniquenessVerdict uniqueness_check(const KnowledgeGraph& graph, const TaskSpec& task);

// True when following the evidence chain edge-by-edge reproduces the gold
// answer at the terminal node.
bool gold_rederivable(const KnowledgeGraph& graph, const TaskSpec& task);

}  // namespace trailgen
