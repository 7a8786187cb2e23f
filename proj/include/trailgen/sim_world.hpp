#pragma once

#include <map>
#include <string>
#include <vector>

#include "trailgen/graph.hpp"

namespace trailgen {

struct SimDocument {
    NodeId id;
    std::string title;
    std::string body;  // one sentence per line
};

struct SearchHit {
    NodeId id;
    std::string title;
    std::string snippet;
    size_t score = 0;  // distinct shared tokens with the query
};

// Deterministic document corpus rendered from a knowledge graph: one page per
// node (title = label, body = attribute sentences then incident-edge
// sentences) plus an inverted token index. Immutable after render.
class SimWorld {
  public:
    static SimWorld render(const KnowledgeGraph& graph);

    const std::vector<SimDocument>& documents() const { return docs_; }
    const SimDocument* find(const NodeId& id) const;
    const std::string& entity_kind(const NodeId& id) const;

    // Token-overlap ranking, ties broken by doc id. Only docs sharing at
    // least one token with the query are returned.
    std::vector<SearchHit> search(const std::string& query, size_t top_n,
                                  size_t snippet_chars) const;

    // Same ranking restricted to documents whose node kind is in `kinds`.
    std::vector<SearchHit> search_kinds(const std::string& query, size_t top_n,
                                        size_t snippet_chars,
                                        const std::vector<std::string>& kinds) const;

  private:
    std::vector<SimDocument> docs_;  // sorted by id
    std::map<NodeId, size_t> index_;
    std::map<NodeId, std::string> kinds_;
    std::map<std::string, std::vector<size_t>> postings_;  // token -> doc indices
};

// First window of `width` characters centered on the earliest query-token match.
std::string make_snippet(const std::string& body, const std::vector<std::string>& query_tokens,
                         size_t width);

}  // namespace trailgen
