#pragma once

#include <cstdint>

#include "trailgen/task.hpp"

namespace trailgen {

// Candidate question rejected by a synthesis precondition or an oracle gate.
// `check` names the failing gate (no_path, degenerate, answer_unsound,
// shortcut, floor, ambiguous, no_satisfying_path, parse, ...).
struct synth_rejection : data_error {
    std::string check;
    synth_rejection(std::string check_, const std::string& msg)
        : data_error(msg), check(std::move(check_)) {}
};

struct PathSample {
    std::vector<NodeId> nodes;
    std::vector<PathStep> steps;
};

// Every ordered simple path with `hops` edges inside the subgraph, traversing
// edges in both directions, in a deterministic order.
std::vector<PathSample> enumerate_simple_paths(const Subgraph& sub, size_t hops);

// Walks a sampled relation path and phrases it as nested relative clauses;
// entity names are replaced by attribute clauses according to
// cfg.obfuscation_level. Deterministic for a fixed rng_seed. min_hops is set
// to the structural path length; certification happens in gate_task.
TaskSpec synthesize_template(const Subgraph& sub, const KnowledgeGraph& graph,
                             const DifficultyConfig& cfg, std::uint64_t rng_seed);

// Runs the acceptance gates over a candidate: the gold answer must be
// re-derivable from the evidence chain, the certified hop count must clear
// the floor (and, for template tasks, equal the designed length), and the
// answer must be unique. On success stamps task.min_hops with the certified
// count; throws synth_rejection otherwise.
void gate_task(const KnowledgeGraph& graph, TaskSpec& task, size_t min_hops_required);

std::string render_question(const KnowledgeGraph& graph, const TaskConstraints& constraints);

}  // namespace trailgen
