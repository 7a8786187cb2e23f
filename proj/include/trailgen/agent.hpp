#pragma once

#include <functional>
#include <memory>

#include "trailgen/model_client.hpp"
#include "trailgen/task.hpp"
#include "trailgen/tools.hpp"

namespace trailgen {

struct Step {
    std::string reasoning;
    ToolCall action;
    Observation observation;

    json to_json() const;
    static Step from_json(const json& j);
};

enum class TerminatedBy { answer, budget_exhausted, policy_failure };

std::string terminated_by_name(TerminatedBy t);
TerminatedBy parse_terminated_by(const std::string& name);

struct Trajectory {
    std::string task_id;
    std::vector<Step> steps;
    std::string final_reasoning;
    std::string answer;
    size_t tool_call_count = 0;
    TerminatedBy terminated_by = TerminatedBy::policy_failure;
    size_t context_chars_used = 0;

    json to_json() const;
    static Trajectory from_json(const json& j);
};

inline size_t trajectory_steps(const Trajectory& t) { return t.steps.size(); }

// Regular-language check over the serialized record: the step sequence must
// read (r a o)* r y with every component present and well typed.
bool trajectory_grammar_ok(const json& record);

// Sum of reasoning lengths and observation costs, recomputed from the
// trajectory itself (includes the final reasoning).
size_t recompute_context_chars(const Trajectory& t);

std::vector<Trajectory> read_trajectories(const std::string& path);
void write_trajectories(const std::string& path, const std::vector<Trajectory>& trajectories);

struct Budget {
    size_t max_tool_calls = 200;
    // Character proxy for the context window; chars-per-token ratio lives in
    // the pipeline config.
    size_t context_chars = 1'000'000;
};

void validate_budget(const Budget& b);

struct PolicyContext {
    const TaskSpec* task = nullptr;
    const std::vector<Step>* history = nullptr;
    std::string tool_schema;
    bool answer_only = false;  // budget exhausted: the policy must answer
};

struct Decision {
    enum class Arm { tool_call, final_answer };
    Arm arm = Arm::final_answer;
    std::string reasoning;
    ToolCall call;       // tool arm
    std::string answer;  // answer arm
};

class Policy {
  public:
    virtual ~Policy() = default;
    virtual Decision next(const PolicyContext& ctx) = 0;
};

std::unique_ptr<Policy> make_function_policy(
    std::function<Decision(const PolicyContext&)> fn);

// ReAct episode loop under tool-call and context budgets. Policy or dispatch
// failures terminate with policy_failure, keeping the steps seen so far.
Trajectory run_episode(const TaskSpec& task, Policy& policy, ToolRegistry& registry,
                       const Budget& budget);

enum class OracleStyle { direct, padded };

// Scripted policy that walks the task's certified evidence path: per hop one
// search (entity clue), one open (top result) and one find (relation), then
// the gold answer. Padded style inserts `extra_per_hop` additional searches
// per hop. Tool-call count is exactly (3 + extra) * hops. Verifies each
// observation and fails the episode on world desync.
std::unique_ptr<Policy> make_oracle_policy(const KnowledgeGraph& graph, const TaskSpec& task,
                                           OracleStyle style, size_t extra_per_hop = 0);

// Chat-model-backed policy: renders history plus tool schema through the
// named prompt template and parses the reply into exactly one decision arm.
// One reprompt with a format reminder, then failure.
std::unique_ptr<Policy> make_model_policy(ModelClient& client, const std::string& template_id);

}  // namespace trailgen
