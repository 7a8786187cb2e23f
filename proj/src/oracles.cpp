#include "trailgen/oracles.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace trailgen {

namespace {

bool node_matches_gold(const Node& node, const TaskSpec& task) {
    if (answers_match(node.label, task.gold_answer, task.gold_aliases)) return true;
    for (const std::string& alias : node_aliases(node)) {
        if (normalize_answer(alias) == normalize_answer(task.gold_answer)) return true;
    }
    return false;
}

// Tasks produced by the generators carry explicit constraints; hand-written
// fixtures may only have an evidence chain, from which named constraints and
// step directions are reconstructed.
TaskConstraints effective_constraints(const KnowledgeGraph& graph, const TaskSpec& task) {
    if (!task.constraints.steps.empty() &&
        task.constraints.nodes.size() == task.constraints.steps.size()) {
        return task.constraints;
    }
    if (task.evidence_node_ids.size() < 2 ||
        task.relation_path.size() + 1 != task.evidence_node_ids.size()) {
        throw data_error("task '" + task.task_id + "' carries no usable constraints");
    }
    TaskConstraints c;
    for (size_t i = 0; i + 1 < task.evidence_node_ids.size(); ++i) {
        const NodeId& u = task.evidence_node_ids[i];
        const NodeId& v = task.evidence_node_ids[i + 1];
        const std::string& rel = task.relation_path[i];
        bool forward = false;
        bool found = false;
        for (size_t ei : graph.out_edges(u)) {
            const Edge& e = graph.edges()[ei];
            if (e.dst == v && e.relation == rel) {
                forward = true;
                found = true;
                break;
            }
        }
        if (!found) {
            for (size_t ei : graph.in_edges(u)) {
                const Edge& e = graph.edges()[ei];
                if (e.src == v && e.relation == rel) {
                    found = true;
                    break;
                }
            }
        }
        if (!found) {
            throw data_error("task '" + task.task_id + "': no edge '" + rel + "' between '" + u +
                             "' and '" + v + "'");
        }
        NodeConstraint nc;
        nc.name = graph.node(u).label;
        c.nodes.push_back(std::move(nc));
        c.steps.push_back(PathStep{rel, forward});
    }
    return c;
}

std::vector<NodeId> start_candidates(const KnowledgeGraph& graph, const NodeConstraint& start) {
    std::vector<NodeId> out;
    for (const Node& n : graph.nodes()) {
        if (start.satisfied_by(n)) out.push_back(n.id);
    }
    return out;
}

void collect_witnesses(const KnowledgeGraph& graph, const TaskConstraints& c,
                       std::vector<NodeId>& path, size_t depth, std::set<NodeId>& witnesses) {
    if (depth == c.steps.size()) {
        witnesses.insert(path.back());
        return;
    }
    const NodeId& u = path.back();
    const PathStep& step = c.steps[depth];
    auto try_next = [&](const NodeId& next) {
        if (std::find(path.begin(), path.end(), next) != path.end()) return;
        const bool terminal = depth + 1 == c.steps.size();
        if (!terminal && !c.nodes[depth + 1].satisfied_by(graph.node(next))) return;
        path.push_back(next);
        collect_witnesses(graph, c, path, depth + 1, witnesses);
        path.pop_back();
    };
    if (step.forward) {
        for (size_t ei : graph.out_edges(u)) {
            const Edge& e = graph.edges()[ei];
            if (e.relation == step.relation) try_next(e.dst);
        }
    } else {
        for (size_t ei : graph.in_edges(u)) {
            const Edge& e = graph.edges()[ei];
            if (e.relation == step.relation) try_next(e.src);
        }
    }
}

}  // namespace

size_t min_hops_oracle(const KnowledgeGraph& graph, const TaskSpec& task) {
    TaskConstraints c = effective_constraints(graph, task);
    std::set<std::string> relations(task.relation_path.begin(), task.relation_path.end());

    std::vector<NodeId> starts = start_candidates(graph, c.nodes.at(0));
    if (starts.empty()) {
        throw data_error("task '" + task.task_id + "': no node satisfies the start clue");
    }

    std::map<NodeId, size_t> dist;
    std::deque<NodeId> queue;
    for (const NodeId& s : starts) {
        dist[s] = 0;
        queue.push_back(s);
    }
    while (!queue.empty()) {
        NodeId u = queue.front();
        queue.pop_front();
        const size_t d = dist[u];
        if (node_matches_gold(graph.node(u), task)) return d;
        auto visit = [&](const NodeId& v) {
            if (!dist.count(v)) {
                dist[v] = d + 1;
                queue.push_back(v);
            }
        };
        for (size_t ei : graph.out_edges(u)) {
            const Edge& e = graph.edges()[ei];
            if (relations.count(e.relation)) visit(e.dst);
        }
        for (size_t ei : graph.in_edges(u)) {
            const Edge& e = graph.edges()[ei];
            if (relations.count(e.relation)) visit(e.src);
        }
    }
    throw data_error("task '" + task.task_id + "': no satisfying path to the gold answer");
}

UniquenessVerdict uniqueness_check(const KnowledgeGraph& graph, const TaskSpec& task) {
    TaskConstraints c = effective_constraints(graph, task);
    std::set<NodeId> witnesses;
    for (const NodeId& s : start_candidates(graph, c.nodes.at(0))) {
        std::vector<NodeId> path{s};
        collect_witnesses(graph, c, path, 0, witnesses);
    }
    UniquenessVerdict v;
    v.witnesses.assign(witnesses.begin(), witnesses.end());
    v.unique = witnesses.size() == 1;
    return v;
}

bool gold_rederivable(const KnowledgeGraph& graph, const TaskSpec& task) {
    const auto& ev = task.evidence_node_ids;
    if (ev.size() < 2 || task.relation_path.size() + 1 != ev.size()) return false;
    for (const NodeId& id : ev) {
        if (!graph.has_node(id)) return false;
    }
    const bool have_steps = task.constraints.steps.size() == task.relation_path.size();
    for (size_t i = 0; i + 1 < ev.size(); ++i) {
        const std::string& rel = task.relation_path[i];
        bool forward_ok = false;
        bool backward_ok = false;
        for (size_t ei : graph.out_edges(ev[i])) {
            const Edge& e = graph.edges()[ei];
            if (e.dst == ev[i + 1] && e.relation == rel) forward_ok = true;
        }
        for (size_t ei : graph.in_edges(ev[i])) {
            const Edge& e = graph.edges()[ei];
            if (e.src == ev[i + 1] && e.relation == rel) backward_ok = true;
        }
        if (have_steps) {
            if (task.constraints.steps[i].forward ? !forward_ok : !backward_ok) return false;
        } else if (!forward_ok && !backward_ok) {
            return false;
        }
    }
    return node_matches_gold(graph.node(ev.back()), task);
}

}  // namespace trailgen
