#include "trailgen/sim_world.hpp"

#include <algorithm>
#include <set>

namespace trailgen {

namespace {

std::string scalar_to_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

}  // namespace

SimWorld SimWorld::render(const KnowledgeGraph& graph) {
    SimWorld world;
    for (const Node& n : graph.nodes()) {
        SimDocument doc;
        doc.id = n.id;
        doc.title = n.label;

        std::vector<std::string> lines;
        for (auto it = n.attributes.begin(); it != n.attributes.end(); ++it) {
            lines.push_back(n.label + "'s " + it.key() + " is " + scalar_to_text(it.value()) + ".");
        }
        // Incident edges, both directions, in (src, relation, dst) order.
        std::vector<size_t> incident(graph.out_edges(n.id));
        for (size_t i : graph.in_edges(n.id)) incident.push_back(i);
        std::sort(incident.begin(), incident.end());
        incident.erase(std::unique(incident.begin(), incident.end()), incident.end());
        for (size_t i : incident) {
            const Edge& e = graph.edges()[i];
            lines.push_back(graph.node(e.src).label + " " + e.relation + " " +
                            graph.node(e.dst).label + ".");
        }

        for (size_t i = 0; i < lines.size(); ++i) {
            if (i) doc.body += '\n';
            doc.body += lines[i];
        }
        world.kinds_[n.id] = n.entity_kind;
        world.docs_.push_back(std::move(doc));
    }

    std::sort(world.docs_.begin(), world.docs_.end(),
              [](const SimDocument& a, const SimDocument& b) { return a.id < b.id; });
    for (size_t i = 0; i < world.docs_.size(); ++i) {
        world.index_[world.docs_[i].id] = i;
        std::set<std::string> seen;
        for (const std::string& tok : tokenize(world.docs_[i].title + " " + world.docs_[i].body)) {
            if (seen.insert(tok).second) world.postings_[tok].push_back(i);
        }
    }
    return world;
}

const SimDocument* SimWorld::find(const NodeId& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &docs_[it->second];
}

const std::string& SimWorld::entity_kind(const NodeId& id) const {
    static const std::string empty;
    auto it = kinds_.find(id);
    return it == kinds_.end() ? empty : it->second;
}

std::string make_snippet(const std::string& body, const std::vector<std::string>& query_tokens,
                         size_t width) {
    const std::string lowered = to_lower(body);
    size_t pos = std::string::npos;
    for (const std::string& tok : query_tokens) {
        size_t p = lowered.find(tok);
        if (p != std::string::npos && (pos == std::string::npos || p < pos)) pos = p;
    }
    if (pos == std::string::npos) pos = 0;
    size_t start = pos > width / 2 ? pos - width / 2 : 0;
    std::string snippet = body.substr(start, width);
    std::replace(snippet.begin(), snippet.end(), '\n', ' ');
    return snippet;
}

std::vector<SearchHit> SimWorld::search(const std::string& query, size_t top_n,
                                        size_t snippet_chars) const {
    return search_kinds(query, top_n, snippet_chars, {});
}

std::vector<SearchHit> SimWorld::search_kinds(const std::string& query, size_t top_n,
                                              size_t snippet_chars,
                                              const std::vector<std::string>& kinds) const {
    std::vector<std::string> tokens = tokenize(query);
    std::set<std::string> qset(tokens.begin(), tokens.end());

    std::vector<size_t> scores(docs_.size(), 0);
    for (const std::string& tok : qset) {
        auto it = postings_.find(tok);
        if (it == postings_.end()) continue;
        for (size_t d : it->second) ++scores[d];
    }

    std::vector<size_t> ranked;
    for (size_t d = 0; d < docs_.size(); ++d) {
        if (scores[d] == 0) continue;
        if (!kinds.empty() &&
            std::find(kinds.begin(), kinds.end(), entity_kind(docs_[d].id)) == kinds.end()) {
            continue;
        }
        ranked.push_back(d);
    }
    // Stable: docs_ is id-sorted, so equal scores fall back to doc-id order.
    std::stable_sort(ranked.begin(), ranked.end(),
                     [&](size_t a, size_t b) { return scores[a] > scores[b]; });
    if (ranked.size() > top_n) ranked.resize(top_n);

    std::vector<SearchHit> hits;
    for (size_t d : ranked) {
        SearchHit hit;
        hit.id = docs_[d].id;
        hit.title = docs_[d].title;
        hit.snippet = make_snippet(docs_[d].title + "\n" + docs_[d].body, tokens, snippet_chars);
        hit.score = scores[d];
        hits.push_back(std::move(hit));
    }
    return hits;
}

}  // namespace trailgen
