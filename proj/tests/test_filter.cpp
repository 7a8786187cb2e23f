#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <fstream>
#include <random>

#include "doctest.h"
#include "test_util.hpp"
#include "trailgen/filter.hpp"
#include "trailgen/graph_gen.hpp"

using namespace trailgen;
using trailgen::testing::TempDir;

namespace {

DatasetItem make_item(const std::string& id, const std::string& question,
                      const std::string& gold, const std::string& answer, size_t t,
                      TerminatedBy term = TerminatedBy::answer,
                      std::vector<std::string> aliases = {}) {
    DatasetItem item;
    item.task.task_id = id;
    item.task.question = question;
    item.task.gold_answer = gold;
    item.task.gold_aliases = std::move(aliases);
    item.task.generator = "template";
    item.trajectory.task_id = id;
    for (size_t i = 0; i < t; ++i) {
        Step s;
        s.reasoning = "step " + std::to_string(i);
        s.action.tool = "search";
        s.action.args["query"] = "q" + std::to_string(i);
        s.observation.content = "obs";
        s.observation.cost_chars = 3;
        item.trajectory.steps.push_back(std::move(s));
    }
    item.trajectory.final_reasoning = "done";
    item.trajectory.answer = answer;
    item.trajectory.tool_call_count = t;
    item.trajectory.terminated_by = term;
    item.trajectory.context_chars_used = recompute_context_chars(item.trajectory);
    return item;
}

Dataset make_dataset(std::vector<DatasetItem> items) {
    Dataset d;
    d.items = std::move(items);
    d.provenance.input_count = d.items.size();
    d.provenance.output_count = d.items.size();
    return d;
}

std::vector<std::string> ids_of(const Dataset& d) {
    std::vector<std::string> out;
    for (const auto& item : d.items) out.push_back(item.task.task_id);
    return out;
}

}  // namespace

TEST_CASE("low-step: t_min = 0 passes everything through in order") {
    Dataset d = make_dataset({make_item("a", "qa", "g", "g", 2),
                              make_item("b", "qb", "g", "g", 0),
                              make_item("c", "qc", "g", "g", 7)});
    Dataset out = low_step_filter(d, 0);
    CHECK(ids_of(out) == std::vector<std::string>{"a", "b", "c"});
    CHECK(out.provenance.stages.back().dropped == 0);
}

TEST_CASE("low-step: inclusive boundary at the threshold") {
    Dataset d = make_dataset({make_item("a", "qa", "g", "g", 2),
                              make_item("b", "qb", "g", "g", 5),
                              make_item("c", "qc", "g", "g", 9)});
    Dataset out = low_step_filter(d, 5);
    CHECK(ids_of(out) == std::vector<std::string>{"b", "c"});
    CHECK(out.provenance.stages.back().input == 3);
    CHECK(out.provenance.stages.back().kept == 2);
    CHECK(out.provenance.stages.back().dropped == 1);
}

TEST_CASE("low-step: matches an independent stream scan over the serialized file") {
    std::mt19937_64 rng(31);
    std::vector<DatasetItem> items;
    for (int i = 0; i < 120; ++i) {
        items.push_back(make_item("t" + std::to_string(i), "q" + std::to_string(i), "g", "g",
                                  rng() % 20));
    }
    Dataset d = make_dataset(items);
    const size_t t_min = 8;
    Dataset out = low_step_filter(d, t_min);

    TempDir tmp;
    const std::string path = tmp.file("items.jsonl");
    write_dataset_items(path, d.items);

    // One-line stream scan: parse each line, keep ids with enough steps.
    std::vector<std::string> scan_kept;
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
        json j = json::parse(line);
        if (j["trajectory"]["steps"].size() >= t_min) {
            scan_kept.push_back(j["task"]["task_id"]);
        }
    }
    CHECK(ids_of(out) == scan_kept);
}

TEST_CASE("correctness: exact match kept, budget exhaustion dropped, normalization applies") {
    Dataset d = make_dataset({
        make_item("exact", "q1", "Paris", "Paris", 3),
        make_item("spaces", "q2", "Paris", "  paris \t", 3),
        make_item("exhausted", "q3", "Paris", "", 3, TerminatedBy::budget_exhausted),
        make_item("failed", "q4", "Paris", "Paris", 3, TerminatedBy::policy_failure),
        make_item("wrong", "q5", "Paris", "Paris, France", 3),
        make_item("alias", "q6", "Paris", "City of Light", 3, TerminatedBy::answer,
                  {"City of Light"}),
    });
    Dataset out = correctness_filter(d);
    CHECK(ids_of(out) == std::vector<std::string>{"exact", "spaces", "alias"});
}

TEST_CASE("dedup: first occurrence wins; question+answer key keeps distinct answers") {
    Dataset d = make_dataset({
        make_item("a", "Who wrote it?", "X", "X", 3),
        make_item("b", "who wrote it?", "X", "X", 4),   // same question, normalized
        make_item("c", "Who wrote it?", "X", "Y", 5),   // same question, different answer
        make_item("d", "Something else?", "X", "X", 6),
    });
    Dataset by_q = dedup(d, "question");
    CHECK(ids_of(by_q) == std::vector<std::string>{"a", "d"});

    Dataset by_qa = dedup(d, "question+answer");
    CHECK(ids_of(by_qa) == std::vector<std::string>{"a", "c", "d"});
}

TEST_CASE("dedup: kept set independent of duplicate positions beyond first-wins") {
    std::vector<DatasetItem> items;
    for (int i = 0; i < 20; ++i) {
        items.push_back(make_item("t" + std::to_string(i), "q" + std::to_string(i % 7), "g", "g",
                                  static_cast<size_t>(i)));
    }
    Dataset base = make_dataset(items);
    Dataset deduped = dedup(base, "question");
    CHECK(deduped.items.size() == 7);

    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        auto shuffled = items;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        Dataset out = dedup(make_dataset(shuffled), "question");
        CHECK(out.items.size() == 7);
        // Key set is permutation-independent.
        std::set<std::string> keys;
        for (const auto& item : out.items) keys.insert(normalize_answer(item.task.question));
        CHECK(keys.size() == 7);
    }
}

TEST_CASE("assemble: empty input gives zeroed provenance") {
    FilterConfig cfg;
    cfg.require_correct = true;
    Dataset out = assemble(make_dataset({}), cfg);
    CHECK(out.items.empty());
    CHECK(out.provenance.input_count == 0);
    CHECK(out.provenance.output_count == 0);
    REQUIRE(out.provenance.stages.size() == 3);
    for (const auto& s : out.provenance.stages) {
        CHECK(s.input == 0);
        CHECK(s.dropped == 0);
    }
}

TEST_CASE("assemble: stage order, conservation and size monotonicity") {
    std::mt19937_64 rng(77);
    std::vector<DatasetItem> items;
    for (int i = 0; i < 200; ++i) {
        const bool correct = rng() % 3 != 0;
        const auto term = rng() % 5 == 0 ? TerminatedBy::budget_exhausted : TerminatedBy::answer;
        items.push_back(make_item("t" + std::to_string(i), "q" + std::to_string(rng() % 150),
                                  "Gold", term == TerminatedBy::answer && correct ? "gold" : "bad",
                                  rng() % 30, term));
    }
    FilterConfig cfg;
    cfg.t_min = 8;
    cfg.require_correct = true;
    Dataset out = assemble(make_dataset(items), cfg);

    REQUIRE(out.provenance.stages.size() == 3);
    CHECK(out.provenance.stages[0].name == "correctness");
    CHECK(out.provenance.stages[1].name == "low_step");
    CHECK(out.provenance.stages[2].name == "dedup");

    // Conservation: input = output + total drops; sizes only shrink.
    size_t drops = 0;
    size_t prev = items.size();
    for (const auto& s : out.provenance.stages) {
        CHECK(s.input == prev);
        CHECK(s.kept <= s.input);
        CHECK(s.input == s.kept + s.dropped);
        drops += s.dropped;
        prev = s.kept;
    }
    CHECK(out.provenance.input_count == items.size());
    CHECK(out.provenance.input_count == out.provenance.output_count + drops);

    for (const auto& item : out.items) {
        CHECK(trajectory_steps(item.trajectory) >= cfg.t_min);
        CHECK(item.trajectory.terminated_by == TerminatedBy::answer);
    }

    // Idempotence.
    Dataset again = assemble(out, cfg);
    CHECK(ids_of(again) == ids_of(out));
    for (const auto& s : again.provenance.stages) CHECK(s.dropped == 0);

    // Monotonicity in t_min: larger thresholds keep subsets. Questions must
    // be unique here, otherwise dedup's first-wins choice may legitimately
    // shift between thresholds.
    std::vector<DatasetItem> unique_q;
    for (int i = 0; i < 200; ++i) {
        unique_q.push_back(make_item("u" + std::to_string(i), "unique q" + std::to_string(i),
                                     "Gold", "gold", rng() % 30));
    }
    std::vector<std::string> prev_ids;
    bool first = true;
    for (size_t t : {50, 8, 1, 0}) {
        FilterConfig c2 = cfg;
        c2.t_min = t;
        std::vector<std::string> kept = ids_of(assemble(make_dataset(unique_q), c2));
        if (!first) {
            for (const std::string& id : prev_ids) {
                CHECK(std::find(kept.begin(), kept.end(), id) != kept.end());
            }
        }
        prev_ids = kept;
        first = false;
    }
}

TEST_CASE("assemble: correctness stage recorded but inert when disabled") {
    Dataset d = make_dataset({make_item("a", "q", "Gold", "wrong answer", 9)});
    FilterConfig cfg;
    cfg.t_min = 0;
    cfg.require_correct = false;
    Dataset out = assemble(d, cfg);
    CHECK(out.items.size() == 1);
    CHECK(out.provenance.stages[0].name == "correctness");
    CHECK_FALSE(out.provenance.stages[0].enabled);
    CHECK(out.provenance.stages[0].dropped == 0);
}

TEST_CASE("join: trajectories must resolve to tasks") {
    DatasetItem item = make_item("known", "q", "g", "g", 1);
    std::vector<TaskSpec> tasks{item.task};
    std::vector<Trajectory> trajs{item.trajectory};
    Dataset ok = join_dataset(tasks, trajs);
    CHECK(ok.items.size() == 1);

    trajs[0].task_id = "mystery";
    CHECK_THROWS_WITH_AS(join_dataset(tasks, trajs), doctest::Contains("mystery"), data_error);
}

TEST_CASE("assemble: padded rollouts clear the floor, direct ones drop") {
    // 2-hop tasks: direct = 6 calls, padded(2) = 10; with t_min = 8 exactly
    // the padded half survives.
    RandomGraphSpec spec;
    spec.nodes = 60;
    spec.mean_degree = 3.0;
    KnowledgeGraph g = generate_random_graph(spec, 404);
    auto tasks = trailgen::testing::certified_tasks(g, 20, 2, 5);
    REQUIRE(tasks.size() == 20);

    SimWorld world = SimWorld::render(g);
    ToolEnvConfig tcfg;
    ToolRegistry reg = make_sim_registry(g, world, tcfg, "v2");

    Dataset raw;
    for (size_t i = 0; i < tasks.size(); ++i) {
        const bool padded = i % 2 == 0;
        auto policy = make_oracle_policy(g, tasks[i],
                                         padded ? OracleStyle::padded : OracleStyle::direct, 2);
        Budget budget;
        Trajectory t = run_episode(tasks[i], *policy, reg, budget);
        REQUIRE(t.terminated_by == TerminatedBy::answer);
        REQUIRE(t.tool_call_count == (padded ? 10u : 6u));
        raw.items.push_back(DatasetItem{tasks[i], t});
    }

    FilterConfig cfg;
    cfg.t_min = 8;
    cfg.require_correct = true;
    Dataset out = assemble(raw, cfg);
    CHECK(out.items.size() == 10);
    for (const auto& item : out.items) CHECK(trajectory_steps(item.trajectory) == 10);
}

TEST_CASE("dataset file round-trip") {
    Dataset d = make_dataset({make_item("a", "q1", "g", "g", 2),
                              make_item("b", "q2", "g", "g", 5)});
    TempDir tmp;
    const std::string path = tmp.file("d.jsonl");
    write_dataset_items(path, d.items);
    auto back = read_dataset_items(path);
    REQUIRE(back.size() == 2);
    for (size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].to_json() == d.items[i].to_json());
    }
}
