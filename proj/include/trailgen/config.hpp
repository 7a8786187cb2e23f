#pragma once

#include "trailgen/agent.hpp"
#include "trailgen/eval.hpp"
#include "trailgen/filter.hpp"
#include "trailgen/graph_gen.hpp"
#include "trailgen/model_client.hpp"
#include "trailgen/task.hpp"
#include "trailgen/tools.hpp"

namespace trailgen {

// One document aggregating every stage's knobs. Parsed strictly: unknown
// keys are rejected, the whole document is validated before any stage runs.
struct PipelineConfig {
    std::uint64_t seed = 42;
    size_t workers = 1;
    std::string out_dir = "out";

    std::string graph_source;  // graph file path; empty -> generate
    RandomGraphSpec graph_random;

    size_t expand_budget = 24;      // K, nodes including the seed
    size_t expand_base_budget = 8;  // the pre-scaling default k, kept as config data
    std::string strategy = "frontier_bfs";

    DifficultyConfig difficulty;
    size_t synth_seeds = 40;
    std::string generator = "template";  // template | model
    std::string synth_template = "synth_v1";
    size_t synth_attempts = 40;  // candidate draws per seed before giving up

    std::string tool_profile = "v2";
    ToolEnvConfig tools;

    Budget budget;
    size_t chars_per_token = 4;  // context window proxy ratio

    std::string policy = "oracle";  // oracle | model
    std::string oracle_style = "direct";
    size_t oracle_padding = 2;
    std::string policy_template = "react_v1";

    FilterConfig filter;
    size_t stats_bucket_width = 10;

    ClientConfig client;
    EvalConfig eval;
};

PipelineConfig default_config();

// Full canonical JSON form (also the schema for unknown-key rejection).
json config_to_json(const PipelineConfig& cfg);

// Strict parse of a (possibly partial) config document merged over defaults.
PipelineConfig config_from_json(const json& doc);

// Reads a config file (JSON, // comments allowed).
PipelineConfig load_config(const std::string& path);

// Sets one dotted-path key (e.g. "filter.t_min") from a JSON-encoded value;
// bare strings are accepted unquoted. Revalidates the whole document.
void apply_override(PipelineConfig& cfg, const std::string& dotted_key,
                    const std::string& value);

void validate_config(const PipelineConfig& cfg);

// Conventional artifact paths under cfg.out_dir.
std::string out_path(const PipelineConfig& cfg, const std::string& filename);

}  // namespace trailgen
