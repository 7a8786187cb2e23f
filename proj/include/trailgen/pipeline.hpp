#pragma once

#include "trailgen/config.hpp"

namespace trailgen {

// Path-to-path stage drivers shared by the C API and the tests. Each returns
// a JSON summary with the counts a caller would print.

// Generates the configured random graph (stage-seeded from cfg.seed).
KnowledgeGraph generate_graph(const PipelineConfig& cfg);
json run_graph_gen(const PipelineConfig& cfg, const std::string& out_file);

json run_synth(const PipelineConfig& cfg, const KnowledgeGraph& graph,
               const std::string& out_file);

json run_rollout(const PipelineConfig& cfg, const KnowledgeGraph& graph,
                 const std::string& tasks_file, const std::string& out_file);

json run_filter(const PipelineConfig& cfg, const std::string& tasks_file,
                const std::string& trajectories_file, const std::string& out_items,
                const std::string& out_provenance, bool lenient);

json run_stats(const PipelineConfig& cfg, const std::string& dataset_file,
               const std::string& name, const std::vector<std::pair<std::string, double>>& refs,
               const std::string& out_json, const std::string& out_csv,
               const std::string& out_svg);

json run_export(const PipelineConfig& cfg, const std::string& dataset_file,
                const std::string& out_file);

json run_eval_stage(const PipelineConfig& cfg, const KnowledgeGraph& graph,
                    const std::string& tasks_file, const std::string& out_json,
                    const std::string& out_csv);

}  // namespace trailgen
