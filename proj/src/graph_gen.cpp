#include "trailgen/graph_gen.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <random>
#include <set>

namespace trailgen {

namespace {

const std::vector<std::string> kAdjectives = {
    "amber",   "azure",    "bronze",  "crimson", "dusky",   "ebony",   "fabled",
    "gilded",  "hollow",   "ivory",   "jade",    "keen",    "lucid",   "marble",
    "noble",   "obsidian", "pale",    "quiet",   "russet",  "silver",  "tidal",
    "umber",   "vivid",    "wistful", "arcane",  "boreal",  "coastal", "distant",
    "eastern", "frosted",  "granite", "harbor",  "inland",  "lunar",   "misty",
    "northern"};

const std::vector<std::string> kNouns = {
    "falcon",  "archive",  "lantern", "meridian", "orchard", "pavilion", "quarry",
    "reservoir", "signal", "terrace", "undertow", "viaduct", "waystation", "zephyr",
    "atlas",   "beacon",   "cistern", "dynamo",   "estuary", "foundry",  "gazette",
    "herald",  "institute", "junction", "kiln",    "ledger",  "monolith", "nocturne",
    "observatory", "press", "registry", "society", "tribune", "union",    "volume",
    "workshop"};

const std::vector<std::string> kKinds = {"person", "place",  "work",
                                         "organization", "event", "device"};

const std::vector<std::string> kRelations = {
    "authored",  "published_in", "located_in", "member_of", "influenced",
    "succeeded", "created",      "part_of",    "allied_with", "studied_at",
    "curated",   "funded"};

struct AttrTheme {
    const char* name;
    std::vector<std::string> values;  // empty -> numeric theme
};

const std::vector<AttrTheme> kThemes = {
    {"era", {"ancient", "medieval", "baroque", "industrial", "modern", "digital"}},
    {"material", {"granite", "oak", "bronze", "ivory", "glass", "steel", "ceramic"}},
    {"field", {"astronomy", "botany", "logic", "cartography", "music", "geometry"}},
    {"color", {"crimson", "azure", "amber", "viridian", "ochre", "slate"}},
    {"region", {"northfold", "southmark", "eastvale", "westreach", "midlands"}},
    {"rating", {}},
    {"founded", {}},
};

std::string capitalize(std::string s) {
    bool start = true;
    for (char& c : s) {
        if (start && c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
        start = (c == ' ');
    }
    return s;
}

}  // namespace

KnowledgeGraph generate_random_graph(const RandomGraphSpec& spec, std::uint64_t seed) {
    if (spec.nodes < 1) throw config_error("graph spec: node count must be >= 1");
    if (spec.mean_degree < 0) throw config_error("graph spec: mean degree must be >= 0");
    if (spec.nodes > 1 && spec.mean_degree > static_cast<double>(spec.nodes - 1)) {
        throw config_error("graph spec: mean degree " + std::to_string(spec.mean_degree) +
                           " exceeds node count - 1");
    }

    std::mt19937_64 rng(seed);
    const size_t n = spec.nodes;

    // Unique labels: shuffled (adjective, noun) pairs, numeric suffix past the pool.
    std::vector<size_t> pairs(kAdjectives.size() * kNouns.size());
    std::iota(pairs.begin(), pairs.end(), 0);
    std::shuffle(pairs.begin(), pairs.end(), rng);

    const int id_width = n > 9999 ? 6 : 4;
    std::vector<Node> nodes;
    nodes.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        Node node;
        char idbuf[16];
        std::snprintf(idbuf, sizeof(idbuf), "n%0*zu", id_width, i);
        node.id = idbuf;

        std::string base;
        if (i < pairs.size()) {
            base = kAdjectives[pairs[i] / kNouns.size()] + " " + kNouns[pairs[i] % kNouns.size()];
        } else {
            base = kAdjectives[i % kAdjectives.size()] + " " + kNouns[i % kNouns.size()] + " " +
                   std::to_string(i);
        }
        node.label = capitalize(base);
        node.entity_kind = kKinds[rng() % kKinds.size()];

        char code[16];
        std::snprintf(code, sizeof(code), "RC-%0*zu", id_width, i);
        node.attributes["code"] = std::string(code);

        std::vector<size_t> theme_order(kThemes.size());
        std::iota(theme_order.begin(), theme_order.end(), 0);
        std::shuffle(theme_order.begin(), theme_order.end(), rng);
        const size_t n_attrs = std::min(spec.attrs_per_node, kThemes.size());
        // Collect picks first: attribute maps serialize in name order per theme list.
        std::vector<std::pair<size_t, json>> picks;
        for (size_t a = 0; a < n_attrs; ++a) {
            const AttrTheme& theme = kThemes[theme_order[a]];
            json value;
            if (theme.values.empty()) {
                if (std::string(theme.name) == "rating") {
                    value = static_cast<int>(1 + rng() % 10);
                } else {
                    value = static_cast<int>(1400 + rng() % 621);
                }
            } else {
                value = theme.values[rng() % theme.values.size()];
            }
            picks.emplace_back(theme_order[a], value);
        }
        std::sort(picks.begin(), picks.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& [ti, value] : picks) node.attributes[kThemes[ti].name] = value;

        if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < spec.alias_prob) {
            node.attributes["aliases"] = "The " + node.label;
        }
        node.description = "A " + node.entity_kind + " recorded as " + node.label + ".";
        nodes.push_back(std::move(node));
    }

    auto node_id = [&](size_t i) { return nodes[i].id; };

    std::vector<Edge> edges;
    std::set<std::tuple<NodeId, std::string, NodeId>> seen;
    auto try_add = [&](size_t u, size_t v, const std::string& rel) {
        if (u == v) return false;
        if (!seen.emplace(node_id(u), rel, node_id(v)).second) return false;
        Edge e;
        e.src = node_id(u);
        e.dst = node_id(v);
        e.relation = rel;
        if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < spec.qualifier_prob) {
            e.qualifiers["since"] = static_cast<int>(1400 + rng() % 621);
        }
        edges.push_back(std::move(e));
        return true;
    };

    const size_t target_edges =
        static_cast<size_t>(spec.mean_degree * static_cast<double>(n) / 2.0 + 0.5);

    if (spec.connected && n > 1) {
        // Random-attachment spanning tree keeps everything in one component.
        for (size_t i = 1; i < n; ++i) {
            size_t j = std::uniform_int_distribution<size_t>(0, i - 1)(rng);
            const std::string& rel = kRelations[rng() % kRelations.size()];
            bool flip = (rng() & 1) != 0;
            try_add(flip ? i : j, flip ? j : i, rel);
        }
    }

    size_t attempts = 0;
    const size_t max_attempts = 20 * target_edges + 100;
    while (edges.size() < target_edges && attempts < max_attempts && n > 1) {
        ++attempts;
        size_t u = std::uniform_int_distribution<size_t>(0, n - 1)(rng);
        size_t v = std::uniform_int_distribution<size_t>(0, n - 1)(rng);
        try_add(u, v, kRelations[rng() % kRelations.size()]);
    }

    return KnowledgeGraph(std::move(nodes), std::move(edges));
}

}  // namespace trailgen
