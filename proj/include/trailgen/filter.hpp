#pragma once

#include "trailgen/agent.hpp"
#include "trailgen/task.hpp"

namespace trailgen {

struct FilterConfig {
    size_t t_min = 8;
    bool require_correct = false;
    std::string dedup_on = "question";  // question | question+answer
};

void validate_filter_config(const FilterConfig& cfg);

struct DatasetItem {
    TaskSpec task;
    Trajectory trajectory;

    json to_json() const;
    static DatasetItem from_json(const json& j);
};

struct StageCount {
    std::string name;
    size_t input = 0;
    size_t kept = 0;
    size_t dropped = 0;
    bool enabled = true;
};

struct Provenance {
    json config = json::object();
    std::vector<StageCount> stages;
    size_t input_count = 0;
    size_t output_count = 0;

    json to_json() const;
};

struct Dataset {
    std::vector<DatasetItem> items;
    Provenance provenance;
};

// Joins task specs and trajectories by task_id (every trajectory must
// resolve; order follows the trajectory file).
Dataset join_dataset(const std::vector<TaskSpec>& tasks,
                     const std::vector<Trajectory>& trajectories);

// Keeps items with T(trajectory) >= t_min, order preserved.
Dataset low_step_filter(const Dataset& data, size_t t_min);

// Keeps items whose trajectory answered and whose answer normalizes equal to
// the gold answer or one of its aliases.
Dataset correctness_filter(const Dataset& data);

// First occurrence wins; key is the normalized question, optionally with the
// normalized answer appended.
Dataset dedup(const Dataset& data, const std::string& key);

// correctness (if enabled) -> low-step -> dedup, recording per-stage counts.
Dataset assemble(const Dataset& raw, const FilterConfig& cfg);

std::vector<DatasetItem> read_dataset_items(const std::string& path);
void write_dataset_items(const std::string& path, const std::vector<DatasetItem>& items);

}  // namespace trailgen
