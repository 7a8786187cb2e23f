#include "trailgen/graph.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

namespace trailgen {

namespace {

// Pulls a required string field, erasing it from the working copy so the
// remainder can be kept as `extra`.
std::string take_string(json& j, const char* key, bool required, const std::string& ctx) {
    auto it = j.find(key);
    if (it == j.end()) {
        if (required) throw data_error(ctx + ": missing field '" + key + "'");
        return {};
    }
    if (!it->is_string()) throw data_error(ctx + ": field '" + key + "' must be a string");
    std::string v = it->get<std::string>();
    j.erase(it);
    return v;
}

json take_object(json& j, const char* key, const std::string& ctx) {
    auto it = j.find(key);
    if (it == j.end()) return json::object();
    if (!it->is_object()) throw data_error(ctx + ": field '" + key + "' must be an object");
    json v = *it;
    j.erase(it);
    return v;
}

void check_scalar_map(const json& obj, const std::string& ctx) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!is_scalar(it.value())) {
            throw data_error(ctx + ": value of '" + it.key() + "' must be a scalar, got " +
                             json_kind_name(it.value()));
        }
    }
}

}  // namespace

json Node::to_json() const {
    json j;
    j["type"] = "node";
    j["id"] = id;
    j["label"] = label;
    j["entity_kind"] = entity_kind;
    j["attributes"] = attributes;
    j["description"] = description;
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    return j;
}

Node Node::from_json(const json& in) {
    json j = in;
    j.erase("type");
    Node n;
    const std::string ctx = "node";
    n.id = take_string(j, "id", true, ctx);
    n.label = take_string(j, "label", true, ctx);
    n.entity_kind = take_string(j, "entity_kind", false, ctx);
    n.attributes = take_object(j, "attributes", ctx);
    n.description = take_string(j, "description", false, ctx);
    check_scalar_map(n.attributes, "node '" + n.id + "' attributes");
    n.extra = std::move(j);
    return n;
}

json Edge::to_json() const {
    json j;
    j["type"] = "edge";
    j["src"] = src;
    j["dst"] = dst;
    j["relation"] = relation;
    j["qualifiers"] = qualifiers;
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    return j;
}

Edge Edge::from_json(const json& in) {
    json j = in;
    j.erase("type");
    Edge e;
    const std::string ctx = "edge";
    e.src = take_string(j, "src", true, ctx);
    e.dst = take_string(j, "dst", true, ctx);
    e.relation = take_string(j, "relation", true, ctx);
    e.qualifiers = take_object(j, "qualifiers", ctx);
    check_scalar_map(e.qualifiers, "edge qualifiers");
    e.extra = std::move(j);
    return e;
}

const json* find_attribute(const Node& node, const std::string& name) {
    auto it = node.attributes.find(name);
    if (it == node.attributes.end()) return nullptr;
    return &it.value();
}

std::vector<std::string> node_aliases(const Node& node) {
    std::vector<std::string> out;
    const json* v = find_attribute(node, "aliases");
    if (!v || !v->is_string()) return out;
    std::stringstream ss(v->get<std::string>());
    std::string part;
    while (std::getline(ss, part, '|')) {
        part = trim(part);
        if (!part.empty()) out.push_back(part);
    }
    return out;
}

KnowledgeGraph::KnowledgeGraph(std::vector<Node> nodes, std::vector<Edge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
    std::sort(nodes_.begin(), nodes_.end(),
              [](const Node& a, const Node& b) { return a.id < b.id; });
    for (size_t i = 0; i < nodes_.size(); ++i) {
        const Node& n = nodes_[i];
        if (n.id.empty()) throw data_error("node with empty id");
        if (n.label.empty()) throw data_error("node '" + n.id + "' has empty label");
        if (!node_index_.emplace(n.id, i).second) {
            throw data_error("duplicate node id '" + n.id + "'");
        }
    }

    std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
        return std::tie(a.src, a.relation, a.dst) < std::tie(b.src, b.relation, b.dst);
    });
    std::set<std::tuple<NodeId, std::string, NodeId>> seen;
    for (size_t i = 0; i < edges_.size(); ++i) {
        const Edge& e = edges_[i];
        if (e.relation.empty()) throw data_error("edge with empty relation");
        if (!node_index_.count(e.src)) {
            throw data_error("dangling edge: unknown node '" + e.src + "'");
        }
        if (!node_index_.count(e.dst)) {
            throw data_error("dangling edge: unknown node '" + e.dst + "'");
        }
        if (!seen.emplace(e.src, e.relation, e.dst).second) {
            throw data_error("duplicate edge (" + e.src + ", " + e.relation + ", " + e.dst + ")");
        }
        out_[e.src].push_back(i);
        in_[e.dst].push_back(i);
    }
}

KnowledgeGraph KnowledgeGraph::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open graph file: " + path);
    std::vector<Node> nodes;
    std::vector<Edge> edges;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw data_error(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        try {
            const std::string type = j.value("type", "");
            if (type == "node") {
                nodes.push_back(Node::from_json(j));
            } else if (type == "edge") {
                edges.push_back(Edge::from_json(j));
            } else {
                throw data_error("record tag must be 'node' or 'edge'");
            }
        } catch (const data_error& e) {
            throw data_error(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return KnowledgeGraph(std::move(nodes), std::move(edges));
}

std::string KnowledgeGraph::serialize() const {
    std::string out;
    for (const Node& n : nodes_) {
        out += n.to_json().dump();
        out += '\n';
    }
    for (const Edge& e : edges_) {
        out += e.to_json().dump();
        out += '\n';
    }
    return out;
}

void KnowledgeGraph::save(const std::string& path) const {
    atomic_write_text(path, serialize());
}

bool KnowledgeGraph::has_node(const NodeId& id) const { return node_index_.count(id) != 0; }

const Node& KnowledgeGraph::node(const NodeId& id) const {
    auto it = node_index_.find(id);
    if (it == node_index_.end()) throw data_error("unknown node id '" + id + "'");
    return nodes_[it->second];
}

const std::vector<size_t>& KnowledgeGraph::out_edges(const NodeId& id) const {
    static const std::vector<size_t> empty;
    auto it = out_.find(id);
    return it == out_.end() ? empty : it->second;
}

const std::vector<size_t>& KnowledgeGraph::in_edges(const NodeId& id) const {
    static const std::vector<size_t> empty;
    auto it = in_.find(id);
    return it == in_.end() ? empty : it->second;
}

std::vector<NodeId> KnowledgeGraph::neighbors(const NodeId& id) const {
    std::set<NodeId> out;
    for (size_t i : out_edges(id)) out.insert(edges_[i].dst);
    for (size_t i : in_edges(id)) out.insert(edges_[i].src);
    out.erase(id);
    return std::vector<NodeId>(out.begin(), out.end());
}

std::vector<Edge> KnowledgeGraph::induced_edges(const std::vector<NodeId>& node_ids) const {
    std::set<NodeId> members;
    for (const NodeId& id : node_ids) {
        if (!has_node(id)) throw data_error("unknown node id '" + id + "'");
        members.insert(id);
    }
    std::vector<Edge> out;
    for (const Edge& e : edges_) {
        if (members.count(e.src) && members.count(e.dst)) out.push_back(e);
    }
    return out;  // edges_ is already in (src, relation, dst) order
}

}  // namespace trailgen
