#pragma once

#include "trailgen/model_client.hpp"
#include "trailgen/task.hpp"
#include "trailgen/task_synth.hpp"

namespace trailgen {

// Serializes the subgraph into the generation prompt, parses the reply, and
// runs the same oracle gates as the template generator before accepting.
// Throws synth_rejection with the failing check, or upstream_error on
// transport problems.
TaskSpec synthesize_model(const Subgraph& sub, const KnowledgeGraph& graph, ModelClient& client,
                          const std::string& template_id, const DifficultyConfig& cfg);

// Prompt-facing rendering of a subgraph (nodes with attributes, then edges).
std::string describe_subgraph(const Subgraph& sub, const KnowledgeGraph& graph);

}  // namespace trailgen
