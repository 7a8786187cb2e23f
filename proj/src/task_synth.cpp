#include "trailgen/task_synth.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "trailgen/oracles.hpp"

namespace trailgen {

namespace {

struct HopOption {
    std::string relation;
    NodeId other;
    bool forward;

    bool operator<(const HopOption& o) const {
        return std::tie(relation, other, forward) < std::tie(o.relation, o.other, o.forward);
    }
};

std::map<NodeId, std::vector<HopOption>> build_adjacency(const Subgraph& sub) {
    std::map<NodeId, std::vector<HopOption>> adj;
    for (const NodeId& id : sub.node_ids) adj[id];
    for (const EdgeRef& e : sub.edges) {
        adj[e.src].push_back(HopOption{e.relation, e.dst, true});
        adj[e.dst].push_back(HopOption{e.relation, e.src, false});
    }
    for (auto& [id, options] : adj) std::sort(options.begin(), options.end());
    return adj;
}

void extend_paths(const std::map<NodeId, std::vector<HopOption>>& adj, PathSample& cur,
                  size_t hops, std::vector<PathSample>& out) {
    if (cur.steps.size() == hops) {
        out.push_back(cur);
        return;
    }
    const NodeId& u = cur.nodes.back();
    auto it = adj.find(u);
    if (it == adj.end()) return;
    for (const HopOption& opt : it->second) {
        if (std::find(cur.nodes.begin(), cur.nodes.end(), opt.other) != cur.nodes.end()) continue;
        cur.nodes.push_back(opt.other);
        cur.steps.push_back(PathStep{opt.relation, opt.forward});
        extend_paths(adj, cur, hops, out);
        cur.nodes.pop_back();
        cur.steps.pop_back();
    }
}

std::string relation_words(const std::string& relation) {
    std::string out = relation;
    std::replace(out.begin(), out.end(), '_', ' ');
    return out;
}

std::string scalar_text(const json& v) {
    return v.is_string() ? v.get<std::string>() : v.dump();
}

std::string clause_text(const NodeConstraint& c) {
    std::string head = "the " + (c.kind ? *c.kind : std::string("entity"));
    for (size_t i = 0; i < c.attrs.size(); ++i) {
        head += (i == 0 ? " whose " : " and whose ") + c.attrs[i].first + " is " +
                scalar_text(c.attrs[i].second);
    }
    return head;
}

// Picks the clue content for one path position. Attribute clauses exclude
// the aliases attribute; nodes without usable attributes fall back to names.
NodeConstraint make_constraint(const Node& node, int obfuscation, bool is_start,
                               std::mt19937_64& rng) {
    const bool use_name = obfuscation == 0 || (obfuscation == 1 && is_start);
    NodeConstraint c;
    if (!use_name) {
        std::vector<std::string> keys;
        for (auto it = node.attributes.begin(); it != node.attributes.end(); ++it) {
            if (it.key() != "aliases") keys.push_back(it.key());
        }
        if (!keys.empty()) {
            c.kind = node.entity_kind.empty() ? "entity" : node.entity_kind;
            const size_t want = obfuscation >= 3 ? 2 : 1;
            for (size_t k = 0; k < std::min(want, keys.size()); ++k) {
                size_t pick = std::uniform_int_distribution<size_t>(0, keys.size() - 1)(rng);
                const std::string key = keys[pick];
                keys.erase(keys.begin() + static_cast<std::ptrdiff_t>(pick));
                c.attrs.emplace_back(key, *find_attribute(node, key));
            }
            return c;
        }
    }
    c.name = node.label;
    return c;
}

}  // namespace

std::vector<PathSample> enumerate_simple_paths(const Subgraph& sub, size_t hops) {
    auto adj = build_adjacency(sub);
    std::vector<NodeId> starts = sub.node_ids;
    std::sort(starts.begin(), starts.end());

    std::vector<PathSample> out;
    for (const NodeId& start : starts) {
        PathSample cur;
        cur.nodes.push_back(start);
        extend_paths(adj, cur, hops, out);
    }
    return out;
}

std::string render_question(const KnowledgeGraph& graph, const TaskConstraints& constraints) {
    (void)graph;
    std::string expr;
    for (size_t i = 0; i <= constraints.steps.size(); ++i) {
        std::string desc;
        if (i < constraints.nodes.size()) {
            const NodeConstraint& c = constraints.nodes[i];
            desc = c.name ? (i == 0 ? *c.name : "the entity named " + *c.name) : clause_text(c);
        } else {
            desc = "the entity";
        }
        if (i == 0) {
            expr = desc;
            continue;
        }
        const PathStep& step = constraints.steps[i - 1];
        const std::string rel = relation_words(step.relation);
        expr = step.forward ? desc + " that " + expr + " " + rel
                            : desc + " that " + rel + " " + expr;
    }
    return "Which is " + expr + "?";
}

TaskSpec synthesize_template(const Subgraph& sub, const KnowledgeGraph& graph,
                             const DifficultyConfig& cfg, std::uint64_t rng_seed) {
    validate_difficulty(cfg);
    if (sub.node_ids.size() < 2) {
        throw synth_rejection("degenerate", "subgraph '" + sub.seed +
                                                "' is too small for a " +
                                                std::to_string(cfg.hop_count) + "-hop question");
    }
    std::vector<PathSample> paths = enumerate_simple_paths(sub, cfg.hop_count);
    if (paths.empty()) {
        throw synth_rejection("no_path", "subgraph '" + sub.seed + "' has no simple path of length " +
                                             std::to_string(cfg.hop_count));
    }

    std::mt19937_64 rng(rng_seed);
    const PathSample& path =
        paths[std::uniform_int_distribution<size_t>(0, paths.size() - 1)(rng)];

    TaskConstraints constraints;
    constraints.steps = path.steps;
    for (size_t i = 0; i + 1 < path.nodes.size(); ++i) {
        constraints.nodes.push_back(
            make_constraint(graph.node(path.nodes[i]), cfg.obfuscation_level, i == 0, rng));
    }

    const Node& answer_node = graph.node(path.nodes.back());

    TaskSpec task;
    task.question = render_question(graph, constraints);
    task.gold_answer = answer_node.label;
    task.gold_aliases = node_aliases(answer_node);
    task.evidence_node_ids = path.nodes;
    for (const PathStep& s : path.steps) task.relation_path.push_back(s.relation);
    task.min_hops = cfg.hop_count;
    task.generator = "template";
    task.constraints = std::move(constraints);
    task.source_subgraph = sub;

    std::string key = task.question + "|" + task.gold_answer;
    for (const NodeId& id : task.evidence_node_ids) key += "|" + id;
    task.task_id = "t" + hex64(fnv1a64(key));
    return task;
}

void gate_task(const KnowledgeGraph& graph, TaskSpec& task, size_t min_hops_required) {
    if (!gold_rederivable(graph, task)) {
        throw synth_rejection("answer_unsound",
                              "task '" + task.task_id + "': evidence chain does not yield gold");
    }

    size_t certified = 0;
    try {
        certified = min_hops_oracle(graph, task);
    } catch (const data_error& e) {
        throw synth_rejection("no_satisfying_path", e.what());
    }
    if (certified < min_hops_required) {
        throw synth_rejection("floor", "task '" + task.task_id + "': certified " +
                                           std::to_string(certified) + " hops, floor is " +
                                           std::to_string(min_hops_required));
    }
    if (task.generator == "template" && certified != task.relation_path.size()) {
        throw synth_rejection("shortcut", "task '" + task.task_id + "': designed " +
                                              std::to_string(task.relation_path.size()) +
                                              " hops but a " + std::to_string(certified) +
                                              "-hop route exists");
    }

    UniquenessVerdict verdict = uniqueness_check(graph, task);
    if (!verdict.unique) {
        std::string msg = "task '" + task.task_id + "': ambiguous answer; witnesses:";
        for (const NodeId& w : verdict.witnesses) msg += " " + w;
        throw synth_rejection("ambiguous", msg);
    }

    task.min_hops = certified;
}

}  // namespace trailgen
