#pragma once

#include <map>
#include <string>
#include <vector>

#include "trailgen/util.hpp"

namespace trailgen {

using NodeId = std::string;

struct Node {
    NodeId id;
    std::string label;
    std::string entity_kind;
    json attributes = json::object();  // ordered attribute-name -> scalar
    std::string description;
    json extra = json::object();  // unknown fields, preserved on round-trip

    json to_json() const;
    static Node from_json(const json& j);
};

struct Edge {
    NodeId src;
    NodeId dst;
    std::string relation;
    json qualifiers = json::object();
    json extra = json::object();

    json to_json() const;
    static Edge from_json(const json& j);
};

// Attribute value of a node, or null if absent.
const json* find_attribute(const Node& node, const std::string& name);

// Aliases come from a pipe-separated "aliases" attribute.
std::vector<std::string> node_aliases(const Node& node);

// Immutable after construction; safe for concurrent reads.
class KnowledgeGraph {
  public:
    KnowledgeGraph() = default;
    KnowledgeGraph(std::vector<Node> nodes, std::vector<Edge> edges);

    static KnowledgeGraph load(const std::string& path);
    void save(const std::string& path) const;

    // Full file image: nodes sorted by id, then edges by (src, relation, dst).
    std::string serialize() const;

    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }

    bool has_node(const NodeId& id) const;
    const Node& node(const NodeId& id) const;  // throws data_error if missing

    // Edge indices into edges(), derived adjacency.
    const std::vector<size_t>& out_edges(const NodeId& id) const;
    const std::vector<size_t>& in_edges(const NodeId& id) const;

    // Sorted unique neighbor ids over both edge directions.
    std::vector<NodeId> neighbors(const NodeId& id) const;

    // Exactly the edges with both endpoints in node_ids, in (src, relation, dst)
    // order. Throws data_error on an unknown id.
    std::vector<Edge> induced_edges(const std::vector<NodeId>& node_ids) const;

  private:
    std::vector<Node> nodes_;   // sorted by id
    std::vector<Edge> edges_;   // sorted by (src, relation, dst)
    std::map<NodeId, size_t> node_index_;
    std::map<NodeId, std::vector<size_t>> out_;
    std::map<NodeId, std::vector<size_t>> in_;
};

}  // namespace trailgen
