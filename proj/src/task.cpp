#include "trailgen/task.hpp"

namespace trailgen {

bool NodeConstraint::satisfied_by(const Node& node) const {
    if (name && normalize_answer(*name) != normalize_answer(node.label)) return false;
    if (kind && *kind != node.entity_kind) return false;
    for (const auto& [key, value] : attrs) {
        const json* v = find_attribute(node, key);
        if (!v || *v != value) return false;
    }
    return true;
}

json NodeConstraint::to_json() const {
    json j = json::object();
    if (name) j["name"] = *name;
    if (kind) j["kind"] = *kind;
    if (!attrs.empty()) {
        json a = json::object();
        for (const auto& [key, value] : attrs) a[key] = value;
        j["attrs"] = a;
    }
    return j;
}

NodeConstraint NodeConstraint::from_json(const json& j) {
    NodeConstraint c;
    if (j.contains("name")) c.name = j.at("name").get<std::string>();
    if (j.contains("kind")) c.kind = j.at("kind").get<std::string>();
    if (j.contains("attrs")) {
        for (auto it = j.at("attrs").begin(); it != j.at("attrs").end(); ++it) {
            c.attrs.emplace_back(it.key(), it.value());
        }
    }
    return c;
}

json PathStep::to_json() const {
    json j;
    j["relation"] = relation;
    j["forward"] = forward;
    return j;
}

PathStep PathStep::from_json(const json& j) {
    return PathStep{j.at("relation").get<std::string>(), j.at("forward").get<bool>()};
}

json TaskConstraints::to_json() const {
    json j;
    json ns = json::array();
    for (const auto& n : nodes) ns.push_back(n.to_json());
    json ss = json::array();
    for (const auto& s : steps) ss.push_back(s.to_json());
    j["nodes"] = ns;
    j["steps"] = ss;
    return j;
}

TaskConstraints TaskConstraints::from_json(const json& j) {
    TaskConstraints c;
    for (const auto& n : j.at("nodes")) c.nodes.push_back(NodeConstraint::from_json(n));
    for (const auto& s : j.at("steps")) c.steps.push_back(PathStep::from_json(s));
    return c;
}

json TaskSpec::to_json() const {
    json j;
    j["task_id"] = task_id;
    j["question"] = question;
    j["gold_answer"] = gold_answer;
    j["gold_aliases"] = gold_aliases;
    j["evidence_node_ids"] = evidence_node_ids;
    j["relation_path"] = relation_path;
    j["min_hops"] = min_hops;
    j["generator"] = generator;
    j["constraints"] = constraints.to_json();
    j["source_subgraph"] = source_subgraph.to_json();
    return j;
}

TaskSpec TaskSpec::from_json(const json& j) {
    TaskSpec t;
    t.task_id = j.at("task_id").get<std::string>();
    t.question = j.at("question").get<std::string>();
    t.gold_answer = j.at("gold_answer").get<std::string>();
    t.gold_aliases = j.value("gold_aliases", std::vector<std::string>{});
    t.evidence_node_ids = j.at("evidence_node_ids").get<std::vector<std::string>>();
    t.relation_path = j.at("relation_path").get<std::vector<std::string>>();
    t.min_hops = j.at("min_hops").get<size_t>();
    t.generator = j.at("generator").get<std::string>();
    if (j.contains("constraints")) t.constraints = TaskConstraints::from_json(j.at("constraints"));
    if (j.contains("source_subgraph")) {
        t.source_subgraph = Subgraph::from_json(j.at("source_subgraph"));
    }
    if (t.gold_answer.empty()) throw data_error("task '" + t.task_id + "': empty gold answer");
    if (!t.evidence_node_ids.empty() &&
        t.relation_path.size() + 1 != t.evidence_node_ids.size()) {
        throw data_error("task '" + t.task_id + "': relation path / evidence length mismatch");
    }
    return t;
}

void validate_difficulty(const DifficultyConfig& cfg) {
    if (cfg.hop_count < 1) throw config_error("difficulty: hop_count must be >= 1");
    if (cfg.obfuscation_level < 0 || cfg.obfuscation_level > 3) {
        throw config_error("difficulty: obfuscation_level must be in 0..3");
    }
    if (cfg.min_hops_required > cfg.hop_count) {
        throw config_error("difficulty: min_hops_required cannot exceed hop_count");
    }
}

std::vector<TaskSpec> read_tasks(const std::string& path) {
    std::vector<TaskSpec> out;
    for (const JsonlRecord& rec : read_jsonl_records(path, false, nullptr)) {
        try {
            out.push_back(TaskSpec::from_json(rec.value));
        } catch (const std::exception& e) {
            throw data_error(path + ":" + std::to_string(rec.line) + ": " + e.what());
        }
    }
    return out;
}

void write_tasks(const std::string& path, const std::vector<TaskSpec>& tasks) {
    std::vector<json> records;
    records.reserve(tasks.size());
    for (const TaskSpec& t : tasks) records.push_back(t.to_json());
    write_jsonl(path, records);
}

}  // namespace trailgen
