#pragma once

#include "trailgen/agent.hpp"

namespace trailgen {

struct EvalConfig {
    // Search-result entries whose id or title contains one of these patterns
    // are replaced by a masked placeholder. Defaults cover the hugging-face
    // family; extra leakage patterns are configuration.
    std::vector<std::string> mask_patterns = {"huggingface", "hugging-face", "hf.co"};
    std::string judge = "normalized_exact";  // normalized_exact | model
    int trials = 1;
    Budget budget;
};

void validate_eval_config(const EvalConfig& cfg);

inline constexpr const char* kMaskPlaceholder = "[masked]";

// Replaces every content line containing a pattern (case-folded substring)
// with the placeholder. Unmasked lines keep their relative order; idempotent.
Observation mask_links(const Observation& obs, const std::vector<std::string>& patterns);

enum class Verdict { correct, incorrect, unjudged };

// normalized_exact compares canonical answer forms against gold and aliases.
// model mode delegates to the judge prompt and parses a yes/no verdict;
// unparseable replies come back unjudged.
Verdict judge_answer(const std::string& answer, const std::string& gold,
                     const std::vector<std::string>& aliases, const std::string& mode,
                     ModelClient* judge_client = nullptr);

struct TaskResult {
    std::string task_id;
    int trial = 0;
    std::string verdict;  // correct | incorrect | unjudged | failed
    std::string answer;
    size_t tool_calls = 0;
    std::string terminated_by;
};

struct EvalReport {
    size_t total_tasks = 0;
    int trials = 1;
    size_t correct = 0;
    size_t incorrect = 0;
    size_t unjudged = 0;
    size_t failed = 0;
    double accuracy = 0.0;
    double mean_tool_calls = 0.0;
    std::map<std::string, size_t> terminated_by_counts;
    std::vector<TaskResult> per_task;

    json to_json() const;
    std::string summary_csv() const;
};

using PolicyFactory = std::function<std::unique_ptr<Policy>(const TaskSpec&)>;

// Runs trials episodes per task with masking installed on the search tools.
// Per-task failures are recorded, never fatal.
EvalReport run_eval(const std::vector<TaskSpec>& tasks, const PolicyFactory& make_policy,
                    ToolRegistry& registry, const EvalConfig& cfg,
                    ModelClient* judge_client = nullptr, size_t workers = 1);

// Minimal external benchmark record: {id, question, gold, aliases?}.
std::vector<TaskSpec> read_benchmark_tasks(const std::string& path);

}  // namespace trailgen
