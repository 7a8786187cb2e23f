#pragma once

#include <optional>
#include <string>
#include <vector>

#include "trailgen/expand.hpp"
#include "trailgen/graph.hpp"

namespace trailgen {

// Logical form of one question slot: how a non-answer node is pinned down in
// the question text. Either a literal name or a set of attribute clauses
// (optionally with the entity kind).
struct NodeConstraint {
    std::optional<std::string> name;
    std::optional<std::string> kind;
    std::vector<std::pair<std::string, json>> attrs;

    bool satisfied_by(const Node& node) const;

    json to_json() const;
    static NodeConstraint from_json(const json& j);
};

struct PathStep {
    std::string relation;
    bool forward = true;  // false: the edge points toward the previous node

    json to_json() const;
    static PathStep from_json(const json& j);
};

// Constraint program of a question: positions 0..h-1 are constrained, the
// terminal (answer) node is the unknown. nodes.size() == steps.size().
struct TaskConstraints {
    std::vector<NodeConstraint> nodes;
    std::vector<PathStep> steps;

    json to_json() const;
    static TaskConstraints from_json(const json& j);
};

struct TaskSpec {
    std::string task_id;
    std::string question;
    std::string gold_answer;
    std::vector<std::string> gold_aliases;
    std::vector<NodeId> evidence_node_ids;
    std::vector<std::string> relation_path;
    size_t min_hops = 0;
    std::string generator;  // template | model | external
    TaskConstraints constraints;
    Subgraph source_subgraph;

    json to_json() const;
    static TaskSpec from_json(const json& j);
};

struct DifficultyConfig {
    size_t hop_count = 3;
    int obfuscation_level = 2;  // 0..3
    size_t min_hops_required = 2;
};

void validate_difficulty(const DifficultyConfig& cfg);

std::vector<TaskSpec> read_tasks(const std::string& path);
void write_tasks(const std::string& path, const std::vector<TaskSpec>& tasks);

}  // namespace trailgen
