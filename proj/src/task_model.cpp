#include "trailgen/task_model.hpp"

#include <algorithm>

#include "trailgen/prompts.hpp"

namespace trailgen {

std::string describe_subgraph(const Subgraph& sub, const KnowledgeGraph& graph) {
    std::string out;
    std::vector<NodeId> ids = sub.node_ids;
    std::sort(ids.begin(), ids.end());
    for (const NodeId& id : ids) {
        const Node& n = graph.node(id);
        out += id + ": " + n.label + " (" + n.entity_kind + ")";
        for (auto it = n.attributes.begin(); it != n.attributes.end(); ++it) {
            out += "; " + it.key() + "=" +
                   (it.value().is_string() ? it.value().get<std::string>() : it.value().dump());
        }
        out += "\n";
    }
    for (const EdgeRef& e : sub.edges) {
        out += e.src + " -" + e.relation + "-> " + e.dst + "\n";
    }
    return out;
}

TaskSpec synthesize_model(const Subgraph& sub, const KnowledgeGraph& graph, ModelClient& client,
                          const std::string& template_id, const DifficultyConfig& cfg) {
    validate_difficulty(cfg);

    std::vector<ChatMessage> messages;
    messages.push_back({"system", render_template(prompt_template(template_id),
                                                  {{"hops", std::to_string(cfg.hop_count)},
                                                   {"subgraph", ""}})});
    messages.push_back({"user", render_template("Graph:\n{{subgraph}}",
                                                {{"subgraph", describe_subgraph(sub, graph)}})});

    ChatExchange ex = client.complete(messages);

    auto block = extract_fenced(ex.reply, "task");
    if (!block) throw synth_rejection("parse", "model reply has no task block");

    json j;
    try {
        j = json::parse(*block);
    } catch (const json::parse_error& e) {
        throw synth_rejection("parse", std::string("task block is not valid JSON: ") + e.what());
    }

    TaskSpec task;
    try {
        task.question = j.at("question").get<std::string>();
        task.gold_answer = j.at("answer").get<std::string>();
        task.evidence_node_ids = j.at("evidence").get<std::vector<std::string>>();
        task.relation_path = j.at("relations").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw synth_rejection("parse", std::string("task block schema mismatch: ") + e.what());
    }
    if (task.question.empty() || task.gold_answer.empty()) {
        throw synth_rejection("parse", "task block has an empty question or answer");
    }
    if (task.evidence_node_ids.size() != task.relation_path.size() + 1) {
        throw synth_rejection("parse", "evidence/relations length mismatch");
    }
    for (const NodeId& id : task.evidence_node_ids) {
        if (!sub.contains(id)) {
            throw synth_rejection("evidence_outside_subgraph",
                                  "evidence node '" + id + "' is not in the subgraph");
        }
    }

    task.generator = "model";
    task.source_subgraph = sub;
    if (graph.has_node(task.evidence_node_ids.back())) {
        task.gold_aliases = node_aliases(graph.node(task.evidence_node_ids.back()));
    }
    std::string key = task.question + "|" + task.gold_answer;
    for (const NodeId& id : task.evidence_node_ids) key += "|" + id;
    task.task_id = "m" + hex64(fnv1a64(key));
    task.min_hops = task.relation_path.size();

    gate_task(graph, task, cfg.min_hops_required);
    return task;
}

}  // namespace trailgen
