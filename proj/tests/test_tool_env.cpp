#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cstring>
#include <random>
#include <set>

#include "doctest.h"
#include "test_util.hpp"
#include "trailgen/graph_gen.hpp"
#include "trailgen/tools.hpp"

using namespace trailgen;
using trailgen::testing::make_edge;
using trailgen::testing::make_node;

namespace {

KnowledgeGraph small_world_graph() {
    std::vector<Node> nodes;
    nodes.push_back(make_node("a", "Gilded Falcon", "person",
                              {{"era", json("bronze")}, {"code", json("QX-1")}}));
    nodes.push_back(make_node("b", "Quiet Archive", "work",
                              {{"era", json("modern")}, {"code", json("QX-2")}}));
    nodes.push_back(make_node("c", "Noble Terrace", "place", {{"code", json("QX-3")}}));
    std::vector<Edge> edges;
    edges.push_back(make_edge("a", "authored", "b"));
    edges.push_back(make_edge("b", "located_in", "c"));
    return KnowledgeGraph(std::move(nodes), std::move(edges));
}

}  // namespace

TEST_CASE("render: one sentence per attribute, zero edges") {
    std::vector<Node> nodes;
    nodes.push_back(make_node("solo", "Lone Beacon", "device",
                              {{"era", json("ancient")}, {"rating", json(7)}}));
    KnowledgeGraph g(std::move(nodes), {});
    SimWorld world = SimWorld::render(g);
    const SimDocument* doc = world.find("solo");
    REQUIRE(doc != nullptr);
    CHECK(doc->title == "Lone Beacon");
    CHECK(std::count(doc->body.begin(), doc->body.end(), '\n') == 1);  // 2 sentences
    CHECK(doc->body.find("Lone Beacon's era is ancient.") != std::string::npos);
    CHECK(doc->body.find("Lone Beacon's rating is 7.") != std::string::npos);
}

TEST_CASE("render: middle node of a path mentions both neighbors") {
    SimWorld world = SimWorld::render(small_world_graph());
    const SimDocument* doc = world.find("b");
    REQUIRE(doc != nullptr);
    CHECK(doc->body.find("Gilded Falcon authored Quiet Archive.") != std::string::npos);
    CHECK(doc->body.find("Quiet Archive located_in Noble Terrace.") != std::string::npos);
}

TEST_CASE("render: every edge sentence appears in exactly two pages") {
    RandomGraphSpec spec;
    spec.nodes = 50;
    spec.mean_degree = 3.0;
    KnowledgeGraph g = generate_random_graph(spec, 17);
    SimWorld world = SimWorld::render(g);
    for (const Edge& e : g.edges()) {
        const std::string sentence =
            g.node(e.src).label + " " + e.relation + " " + g.node(e.dst).label + ".";
        size_t pages = 0;
        for (const SimDocument& doc : world.documents()) {
            if (doc.body.find(sentence) != std::string::npos) ++pages;
        }
        CHECK(pages == 2);
    }
}

TEST_CASE("search: maximal-overlap query ranks the target first") {
    SimWorld world = SimWorld::render(small_world_graph());
    auto hits = world.search("QX-3 Noble Terrace", 5, 160);
    REQUIRE(!hits.empty());
    CHECK(hits[0].id == "c");
    CHECK(hits[0].title == "Noble Terrace");
}

TEST_CASE("search: zero matching tokens yields no results; empty query too") {
    SimWorld world = SimWorld::render(small_world_graph());
    CHECK(world.search("zzz qqq", 5, 160).empty());
    CHECK(world.search("", 5, 160).empty());
}

TEST_CASE("search: ties broken by doc id order") {
    std::vector<Node> nodes;
    nodes.push_back(make_node("d1", "Red Stone"));
    nodes.push_back(make_node("d2", "Red Stone"));
    nodes.push_back(make_node("d3", "Red Lamp"));
    KnowledgeGraph g(std::move(nodes), {});
    SimWorld world = SimWorld::render(g);
    auto hits = world.search("red stone", 5, 160);
    REQUIRE(hits.size() == 3);
    CHECK(hits[0].id == "d1");
    CHECK(hits[1].id == "d2");
    CHECK(hits[2].id == "d3");
    CHECK(hits[0].score == 2);
    CHECK(hits[2].score == 1);
}

TEST_CASE("search: soundness and completeness against exhaustive scoring") {
    RandomGraphSpec spec;
    spec.nodes = 40;
    spec.mean_degree = 2.5;
    KnowledgeGraph g = generate_random_graph(spec, 23);
    SimWorld world = SimWorld::render(g);

    std::mt19937_64 rng(5);
    for (int q = 0; q < 30; ++q) {
        const Node& a = g.nodes()[rng() % g.nodes().size()];
        const Node& b = g.nodes()[rng() % g.nodes().size()];
        const std::string query = a.label + " " + b.label;
        const size_t top_n = 1 + rng() % 6;
        auto hits = world.search(query, top_n, 160);
        CHECK(hits.size() <= top_n);

        // Brute-force score of every document.
        auto tokens = tokenize(query);
        std::set<std::string> qset(tokens.begin(), tokens.end());
        std::map<NodeId, size_t> brute;
        for (const SimDocument& doc : world.documents()) {
            auto dts = tokenize(doc.title + " " + doc.body);
            std::set<std::string> dset(dts.begin(), dts.end());
            size_t score = 0;
            for (const auto& t : qset) score += dset.count(t);
            if (score > 0) brute[doc.id] = score;
        }

        std::set<NodeId> returned;
        size_t min_returned = SIZE_MAX;
        for (const auto& hit : hits) {
            CHECK(hit.score >= 1);  // soundness
            CHECK(brute.at(hit.id) == hit.score);
            returned.insert(hit.id);
            min_returned = std::min(min_returned, hit.score);
        }
        if (hits.size() < top_n) {
            CHECK(returned.size() == brute.size());  // nothing scoring > 0 was omitted
        } else {
            for (const auto& [id, score] : brute) {
                if (!returned.count(id)) CHECK(score <= min_returned);  // completeness
            }
        }
    }
}

TEST_CASE("tools: open returns the page; unknown id is a soft not-found") {
    KnowledgeGraph g = small_world_graph();
    SimWorld world = SimWorld::render(g);
    ToolEnvConfig cfg;
    ToolRegistry reg = make_sim_registry(g, world, cfg, "v1");

    ToolCall open;
    open.tool = "open";
    open.args["id"] = "a";
    Observation obs = reg.dispatch(open);
    CHECK(obs.content == "# Gilded Falcon\n" + world.find("a")->body);
    CHECK_FALSE(obs.truncated);
    CHECK(obs.cost_chars == obs.content.size());

    open.args["id"] = "ghost";
    Observation missing = reg.dispatch(open);
    CHECK(missing.content.find("ghost") != std::string::npos);
}

TEST_CASE("tools: oversized page is truncated to the cap with a marker") {
    std::vector<Node> nodes;
    Node big = make_node("big", "Sprawling Ledger");
    big.attributes["notes"] = std::string(6000, 'x');
    nodes.push_back(big);
    KnowledgeGraph g(std::move(nodes), {});
    SimWorld world = SimWorld::render(g);
    ToolEnvConfig cfg;  // cap 4096
    ToolRegistry reg = make_sim_registry(g, world, cfg, "v1");

    ToolCall open;
    open.tool = "open";
    open.args["id"] = "big";
    Observation obs = reg.dispatch(open);
    CHECK(obs.truncated);
    CHECK(obs.content.size() == cfg.observation_cap);
    CHECK(obs.cost_chars > cfg.observation_cap);  // full pre-truncation length
    CHECK(obs.content.substr(obs.content.size() - std::strlen(kTruncationMarker)) ==
          kTruncationMarker);
}

TEST_CASE("tools: find returns matching lines with ascending line numbers") {
    std::vector<Node> nodes;
    nodes.push_back(make_node("f", "Filter Fixture", "work",
                              {{"alpha", json("needle one")},
                               {"beta", json("plain")},
                               {"gamma", json("needle two")},
                               {"delta", json("NEEDLE three")}}));
    KnowledgeGraph g(std::move(nodes), {});
    SimWorld world = SimWorld::render(g);
    ToolEnvConfig cfg;
    ToolRegistry reg = make_sim_registry(g, world, cfg, "v1");

    ToolCall find;
    find.tool = "find";
    find.args["id"] = "f";

    find.args["pattern"] = "plain";
    Observation one = reg.dispatch(find);
    CHECK(std::count(one.content.begin(), one.content.end(), '\n') == 0);
    CHECK(one.content.rfind("L3:", 0) == 0);

    find.args["pattern"] = "absent-token";
    Observation none = reg.dispatch(find);
    CHECK(none.content.rfind("No matches", 0) == 0);

    find.args["pattern"] = "needle";  // case-folded, hits 3 attribute lines
    Observation three = reg.dispatch(find);
    std::vector<int> lines;
    size_t pos = 0;
    while ((pos = three.content.find('L', pos)) != std::string::npos) {
        if (pos == 0 || three.content[pos - 1] == '\n') {
            lines.push_back(std::atoi(three.content.c_str() + pos + 1));
        }
        ++pos;
    }
    REQUIRE(lines.size() == 3);
    CHECK(std::is_sorted(lines.begin(), lines.end()));
    CHECK(lines[0] < lines[1]);
}

TEST_CASE("dispatch: validation and error wrapping") {
    KnowledgeGraph g = small_world_graph();
    SimWorld world = SimWorld::render(g);
    ToolEnvConfig cfg;
    ToolRegistry reg = make_sim_registry(g, world, cfg, "v2");

    ToolCall ok;
    ok.tool = "search";
    ok.args["query"] = "Falcon";
    CHECK(reg.dispatch(ok).content.find("[a]") != std::string::npos);

    ToolCall unknown;
    unknown.tool = "browse_x";
    CHECK_THROWS_WITH_AS(reg.dispatch(unknown), doctest::Contains("browse_x"), data_error);

    ToolCall missing;
    missing.tool = "search";
    CHECK_THROWS_WITH_AS(reg.dispatch(missing), doctest::Contains("query"), data_error);

    ToolCall badkind;
    badkind.tool = "search";
    badkind.args["query"] = 42;
    CHECK_THROWS_WITH_AS(reg.dispatch(badkind), doctest::Contains("string"), data_error);

    ToolCall extra;
    extra.tool = "search";
    extra.args["query"] = "x";
    extra.args["surprise"] = true;
    CHECK_THROWS_WITH_AS(reg.dispatch(extra), doctest::Contains("surprise"), data_error);

    // Only the successful dispatch reached the call log.
    auto log = reg.call_log();
    REQUIRE(log.size() == 1);
    CHECK(log[0].tool == "search");
}

TEST_CASE("profiles: v1 has 3 tools, v2 at least 6, same dispatch contract") {
    KnowledgeGraph g = small_world_graph();
    SimWorld world = SimWorld::render(g);
    ToolEnvConfig cfg;
    ToolRegistry v1 = make_sim_registry(g, world, cfg, "v1");
    ToolRegistry v2 = make_sim_registry(g, world, cfg, "v2");
    CHECK(v1.descriptors().size() == 3);
    CHECK(v2.descriptors().size() >= 6);
    CHECK_THROWS_AS(make_sim_registry(g, world, cfg, "v3"), config_error);

    // Identical calls give byte-identical observations on both profiles.
    ToolCall call;
    call.tool = "search";
    call.args["query"] = "Quiet Archive QX-2";
    Observation a = v1.dispatch(call);
    Observation b = v2.dispatch(call);
    CHECK(a.content == b.content);
    CHECK(a.content == v2.dispatch(call).content);  // determinism

    CHECK(v2.schema_text().find("scholar_search") != std::string::npos);
    CHECK(schema_text(profile_descriptors("v1")) == v1.schema_text());
}

TEST_CASE("v2 extras: scholar search, calculator, archive lookup") {
    KnowledgeGraph g = small_world_graph();
    SimWorld world = SimWorld::render(g);
    ToolEnvConfig cfg;
    cfg.scholar_kinds = {"work"};
    ToolRegistry reg = make_sim_registry(g, world, cfg, "v2");

    ToolCall scholar;
    scholar.tool = "scholar_search";
    scholar.args["query"] = "Falcon Archive Terrace";
    Observation s = reg.dispatch(scholar);
    CHECK(s.content.find("[b]") != std::string::npos);  // the only 'work' node
    CHECK(s.content.find("[a]") == std::string::npos);
    CHECK(s.content.find("[c]") == std::string::npos);

    ToolCall calc;
    calc.tool = "calculator";
    calc.args["expression"] = "(2 + 3) * 4 - 6 / 2";
    CHECK(reg.dispatch(calc).content == "17");
    calc.args["expression"] = "-(2.5) * 2";
    CHECK(reg.dispatch(calc).content == "-5");
    calc.args["expression"] = "2 +";
    CHECK_THROWS_AS(reg.dispatch(calc), data_error);
    calc.args["expression"] = "1/0";
    CHECK_THROWS_AS(reg.dispatch(calc), data_error);

    ToolCall archive;
    archive.tool = "archive_lookup";
    archive.args["src"] = "a";
    Observation rec = reg.dispatch(archive);
    CHECK(rec.content == "a authored b {}");
    archive.args.clear();
    archive.args["relation"] = "located_in";
    CHECK(reg.dispatch(archive).content == "b located_in c {}");
    archive.args.clear();
    CHECK_THROWS_AS(reg.dispatch(archive), data_error);
}

TEST_CASE("calculator evaluator precedence and parentheses") {
    CHECK(eval_arithmetic("1 + 2 * 3") == doctest::Approx(7.0));
    CHECK(eval_arithmetic("(1 + 2) * 3") == doctest::Approx(9.0));
    CHECK(eval_arithmetic("10 / 4") == doctest::Approx(2.5));
    CHECK(eval_arithmetic("--3") == doctest::Approx(3.0));
    CHECK_THROWS_AS(eval_arithmetic("two plus two"), data_error);
}

TEST_CASE("search result parser reads back doc ids") {
    std::vector<SearchHit> hits;
    hits.push_back(SearchHit{"n01", "Title One", "snippet", 3});
    hits.push_back(SearchHit{"n02", "Title Two", "snippet", 1});
    const std::string text = format_search_results(hits);
    CHECK(parse_result_ids(text) == std::vector<NodeId>{"n01", "n02"});
    CHECK(parse_result_ids("No results.").empty());
}
