#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "test_util.hpp"
#include "trailgen/agent.hpp"
#include "trailgen/graph_gen.hpp"
#include "trailgen/oracles.hpp"
#include "trailgen/prompts.hpp"
#include "trailgen/task_synth.hpp"

using namespace trailgen;
using trailgen::testing::TempDir;
using trailgen::testing::make_chain;

namespace {

struct Fixture {
    KnowledgeGraph graph;
    SimWorld world;
    ToolRegistry registry;
    TaskSpec task;

    explicit Fixture(size_t hops) : graph(make_chain(make_rels(hops))), world(SimWorld::render(graph)) {
        ToolEnvConfig cfg;
        registry = make_sim_registry(graph, world, cfg, "v2");
        Subgraph sub =
            expand(graph, "n0", graph.nodes().size(), ExpandStrategy::frontier_bfs, 0);
        DifficultyConfig dcfg;
        dcfg.hop_count = hops;
        dcfg.obfuscation_level = 0;
        dcfg.min_hops_required = 1;
        for (uint64_t seed = 0; seed < 64; ++seed) {
            task = synthesize_template(sub, graph, dcfg, seed);
            if (task.evidence_node_ids.front() == "n0") break;
        }
        REQUIRE(task.evidence_node_ids.front() == "n0");
        gate_task(graph, task, 1);
    }

    static std::vector<std::string> make_rels(size_t hops) {
        std::vector<std::string> rels;
        for (size_t i = 0; i < hops; ++i) rels.push_back("relation_" + std::to_string(i));
        return rels;
    }
};

Decision answer_now(const std::string& text) {
    Decision d;
    d.arm = Decision::Arm::final_answer;
    d.reasoning = "No tools needed.";
    d.answer = text;
    return d;
}

Decision call_search(const std::string& query) {
    Decision d;
    d.arm = Decision::Arm::tool_call;
    d.reasoning = "Looking up " + query + ".";
    d.call.tool = "search";
    d.call.args["query"] = query;
    return d;
}

}  // namespace

TEST_CASE("episode: policy that answers immediately gives T=0") {
    Fixture fx(1);
    auto policy =
        make_function_policy([](const PolicyContext&) { return answer_now("whatever"); });
    Budget budget;
    Trajectory t = run_episode(fx.task, *policy, fx.registry, budget);
    CHECK(t.steps.empty());
    CHECK(t.tool_call_count == 0);
    CHECK(t.terminated_by == TerminatedBy::answer);
    CHECK(t.answer == "whatever");
    CHECK(trajectory_steps(t) == 0);
}

TEST_CASE("episode: scripted three calls then answer") {
    Fixture fx(1);
    auto policy = make_function_policy([](const PolicyContext& ctx) {
        if (ctx.history->size() < 3) {
            return call_search("probe " + std::to_string(ctx.history->size()));
        }
        return answer_now("done");
    });
    Budget budget;
    Trajectory t = run_episode(fx.task, *policy, fx.registry, budget);
    CHECK(t.tool_call_count == 3);
    REQUIRE(t.steps.size() == 3);
    for (const Step& s : t.steps) {
        CHECK_FALSE(s.reasoning.empty());
        CHECK(s.action.tool == "search");
        CHECK_FALSE(s.observation.content.empty());
    }
    CHECK(t.terminated_by == TerminatedBy::answer);
}

TEST_CASE("episode: always-calling policy hits the tool budget") {
    Fixture fx(1);
    auto policy = make_function_policy([](const PolicyContext&) { return call_search("again"); });
    Budget budget;
    budget.max_tool_calls = 5;
    Trajectory t = run_episode(fx.task, *policy, fx.registry, budget);
    CHECK(t.tool_call_count == 5);
    CHECK(t.terminated_by == TerminatedBy::budget_exhausted);
    CHECK(t.answer.empty());
}

TEST_CASE("episode: context budget forces the answer-only call") {
    Fixture fx(1);
    size_t answer_only_seen = 0;
    auto policy = make_function_policy([&](const PolicyContext& ctx) {
        if (ctx.answer_only) {
            ++answer_only_seen;
            return answer_now("salvaged");
        }
        return call_search("burn context");
    });
    Budget budget;
    budget.context_chars = 200;  // a single observation blows through this
    Trajectory t = run_episode(fx.task, *policy, fx.registry, budget);
    CHECK(answer_only_seen == 1);
    CHECK(t.terminated_by == TerminatedBy::answer);
    CHECK(t.answer == "salvaged");
    CHECK(t.context_chars_used >= 200);
}

TEST_CASE("episode: dispatch failure preserves the steps seen so far") {
    Fixture fx(1);
    auto policy = make_function_policy([](const PolicyContext& ctx) {
        if (ctx.history->empty()) return call_search("fine");
        Decision d;
        d.arm = Decision::Arm::tool_call;
        d.reasoning = "now break";
        d.call.tool = "no_such_tool";
        return d;
    });
    Budget budget;
    Trajectory t = run_episode(fx.task, *policy, fx.registry, budget);
    CHECK(t.terminated_by == TerminatedBy::policy_failure);
    CHECK(t.tool_call_count == 1);  // the good step is kept
    CHECK(t.final_reasoning.find("no_such_tool") != std::string::npos);
}

TEST_CASE("episode: empty answer in normal mode is a policy failure") {
    Fixture fx(1);
    auto policy = make_function_policy([](const PolicyContext&) { return answer_now(""); });
    Budget budget;
    Trajectory t = run_episode(fx.task, *policy, fx.registry, budget);
    CHECK(t.terminated_by == TerminatedBy::policy_failure);
}

TEST_CASE("oracle policy: direct T = 3 * min_hops, answer equals gold") {
    for (size_t hops : {1, 2, 3}) {
        Fixture fx(hops);
        auto policy = make_oracle_policy(fx.graph, fx.task, OracleStyle::direct);
        Budget budget;
        Trajectory t = run_episode(fx.task, *policy, fx.registry, budget);
        CHECK(t.terminated_by == TerminatedBy::answer);
        CHECK(t.tool_call_count == 3 * fx.task.min_hops);
        CHECK(normalize_answer(t.answer) == normalize_answer(fx.task.gold_answer));
        CHECK(t.context_chars_used == recompute_context_chars(t));
        for (const Step& s : t.steps) CHECK(fx.registry.has(s.action.tool));
    }
}

TEST_CASE("oracle policy: padded(2) on a 2-hop task gives T = 10") {
    Fixture fx(2);
    auto policy = make_oracle_policy(fx.graph, fx.task, OracleStyle::padded, 2);
    Budget budget;
    Trajectory t = run_episode(fx.task, *policy, fx.registry, budget);
    CHECK(t.terminated_by == TerminatedBy::answer);
    CHECK(t.tool_call_count == (3 + 2) * 2);
    CHECK(normalize_answer(t.answer) == normalize_answer(fx.task.gold_answer));
}

TEST_CASE("oracle policy: cut short by the budget, no salvaged answer") {
    Fixture fx(2);
    auto policy = make_oracle_policy(fx.graph, fx.task, OracleStyle::direct);
    Budget budget;
    budget.max_tool_calls = 1;
    Trajectory t = run_episode(fx.task, *policy, fx.registry, budget);
    CHECK(t.tool_call_count == 1);
    CHECK(t.terminated_by == TerminatedBy::budget_exhausted);
    CHECK(t.answer.empty());
}

TEST_CASE("oracle policy: desynced world surfaces as policy failure") {
    Fixture fx(1);
    // A world rendered from a different graph cannot satisfy the plan.
    KnowledgeGraph other = make_chain({"other_relation"});
    std::vector<Node> renamed;
    for (Node n : other.nodes()) {
        n.label = "Wrong " + n.label;
        renamed.push_back(n);
    }
    KnowledgeGraph wrong(std::move(renamed), std::vector<Edge>(other.edges()));
    SimWorld wrong_world = SimWorld::render(wrong);
    ToolEnvConfig cfg;
    ToolRegistry wrong_registry = make_sim_registry(wrong, wrong_world, cfg, "v1");

    auto policy = make_oracle_policy(fx.graph, fx.task, OracleStyle::direct);
    Budget budget;
    Trajectory t = run_episode(fx.task, *policy, wrong_registry, budget);
    CHECK(t.terminated_by == TerminatedBy::policy_failure);
    CHECK(t.final_reasoning.find("desync") != std::string::npos);
}

TEST_CASE("trajectory grammar: serialized records validate as (r a o)* r y") {
    Fixture fx(2);
    auto policy = make_oracle_policy(fx.graph, fx.task, OracleStyle::direct);
    Budget budget;
    Trajectory t = run_episode(fx.task, *policy, fx.registry, budget);

    json good = t.to_json();
    CHECK(trajectory_grammar_ok(good));

    json no_answer = good;
    no_answer.erase("answer");
    CHECK_FALSE(trajectory_grammar_ok(no_answer));

    json broken_step = good;
    broken_step["steps"][0].erase("observation");
    CHECK_FALSE(trajectory_grammar_ok(broken_step));

    json bad_action = good;
    bad_action["steps"][1]["action"].erase("tool");
    CHECK_FALSE(trajectory_grammar_ok(bad_action));
}

TEST_CASE("trajectory file round-trip and validation") {
    Fixture fx(2);
    auto policy = make_oracle_policy(fx.graph, fx.task, OracleStyle::direct);
    Budget budget;
    std::vector<Trajectory> ts;
    ts.push_back(run_episode(fx.task, *policy, fx.registry, budget));

    TempDir tmp;
    const std::string path = tmp.file("traj.jsonl");
    write_trajectories(path, ts);
    std::vector<Trajectory> back = read_trajectories(path);
    REQUIRE(back.size() == 1);
    CHECK(back[0].to_json() == ts[0].to_json());

    // A tampered count is rejected on read.
    json j = ts[0].to_json();
    j["tool_call_count"] = 99;
    atomic_write_text(path, j.dump() + "\n");
    CHECK_THROWS_WITH_AS(read_trajectories(path), doctest::Contains(":1:"), data_error);
}

TEST_CASE("budget law holds for arbitrary call-hungry policies") {
    Fixture fx(1);
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        Budget budget;
        budget.max_tool_calls = 1 + rng() % 12;
        auto policy =
            make_function_policy([](const PolicyContext&) { return call_search("spin"); });
        Trajectory t = run_episode(fx.task, *policy, fx.registry, budget);
        CHECK(t.tool_call_count <= budget.max_tool_calls);
        CHECK(t.tool_call_count == t.steps.size());
        CHECK(t.context_chars_used == recompute_context_chars(t));
    }
}

TEST_CASE("model policy: replayed tool call then final answer") {
    Fixture fx(1);
    TempDir tmp;
    ClientConfig ccfg;
    ccfg.mode = "replay";
    ccfg.transcript_dir = tmp.file("transcripts");

    const std::string system = render_template(prompt_template("react_v1"),
                                               {{"tools", fx.registry.schema_text()}});
    ToolCall search_call;
    search_call.tool = "search";
    search_call.args["query"] = "Alpha Beacon QX-100";

    std::vector<ChatMessage> first{{"system", system}, {"user", fx.task.question}};
    const std::string reasoning = "Start by finding the first entity.";
    const std::string reply1 =
        reasoning + "\n\n" + make_fenced("tool_call", search_call.to_json().dump());
    ModelClient::store_transcript(ccfg.transcript_dir, ccfg.model, ccfg.temperature, first,
                                  reply1);

    Observation obs = fx.registry.dispatch(search_call);
    std::vector<ChatMessage> second = first;
    second.push_back({"assistant", reply1});
    second.push_back({"tool", obs.content});
    const std::string reply2 = "That settles it.\n\n" +
                               make_fenced("final_answer", fx.task.gold_answer);
    ModelClient::store_transcript(ccfg.transcript_dir, ccfg.model, ccfg.temperature, second,
                                  reply2);

    ModelClient client(ccfg);
    auto policy = make_model_policy(client, "react_v1");
    Budget budget;
    Trajectory t = run_episode(fx.task, *policy, fx.registry, budget);
    CHECK(t.terminated_by == TerminatedBy::answer);
    CHECK(t.tool_call_count == 1);
    CHECK(t.steps[0].reasoning == reasoning);
    CHECK(t.steps[0].action.tool == "search");
    CHECK(t.answer == fx.task.gold_answer);
}

TEST_CASE("model policy: malformed reply gets one reprompt, then fails") {
    Fixture fx(1);
    TempDir tmp;
    ClientConfig ccfg;
    ccfg.mode = "replay";
    ccfg.transcript_dir = tmp.file("transcripts");

    const std::string system = render_template(prompt_template("react_v1"),
                                               {{"tools", fx.registry.schema_text()}});
    std::vector<ChatMessage> first{{"system", system}, {"user", fx.task.question}};
    // Both arms present: malformed by the one-arm invariant.
    const std::string bad = "Hmm.\n\n" +
                            make_fenced("tool_call", R"({"tool":"search","args":{"query":"x"}})") +
                            "\n" + make_fenced("final_answer", "also this");
    ModelClient::store_transcript(ccfg.transcript_dir, ccfg.model, ccfg.temperature, first, bad);

    std::vector<ChatMessage> second = first;
    second.push_back({"assistant", bad});
    second.push_back({"user", prompt_template("format_reminder_v1")});
    ModelClient::store_transcript(ccfg.transcript_dir, ccfg.model, ccfg.temperature, second,
                                  "still not a block");

    ModelClient client(ccfg);
    auto policy = make_model_policy(client, "react_v1");
    Budget budget;
    Trajectory t = run_episode(fx.task, *policy, fx.registry, budget);
    CHECK(t.terminated_by == TerminatedBy::policy_failure);
    CHECK(t.steps.empty());
}
