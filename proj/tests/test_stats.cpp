#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <random>

#include "doctest.h"
#include "test_util.hpp"
#include "trailgen/stats.hpp"

using namespace trailgen;

namespace {

DatasetItem item_with_steps(size_t t, size_t context = 0) {
    DatasetItem item;
    item.task.task_id = "t" + std::to_string(t);
    item.task.question = "q";
    item.task.gold_answer = "g";
    item.task.generator = "template";
    item.trajectory.task_id = item.task.task_id;
    for (size_t i = 0; i < t; ++i) {
        Step s;
        s.reasoning = "r";
        s.action.tool = "search";
        s.observation.content = "o";
        s.observation.cost_chars = 1;
        item.trajectory.steps.push_back(std::move(s));
    }
    item.trajectory.answer = "g";
    item.trajectory.final_reasoning = "f";
    item.trajectory.tool_call_count = t;
    item.trajectory.terminated_by = TerminatedBy::answer;
    item.trajectory.context_chars_used = context ? context : recompute_context_chars(item.trajectory);
    return item;
}

Dataset dataset_of(const std::vector<size_t>& step_counts) {
    Dataset d;
    for (size_t t : step_counts) d.items.push_back(item_with_steps(t));
    return d;
}

}  // namespace

TEST_CASE("summarize: mean of {10, 20, 30} is 20") {
    StatsSummary s = summarize(dataset_of({10, 20, 30}));
    CHECK(s.count == 3);
    CHECK(s.mean_defined);
    CHECK(s.mean_tool_calls == doctest::Approx(20.0));
    CHECK(s.min_tool_calls == 10);
    CHECK(s.max_tool_calls == 30);
    CHECK(s.median_tool_calls == doctest::Approx(20.0));
}

TEST_CASE("summarize: empty dataset carries the undefined-mean marker") {
    StatsSummary s = summarize(Dataset{});
    CHECK(s.count == 0);
    CHECK_FALSE(s.mean_defined);
    CHECK(s.to_json()["mean_tool_calls"].is_null());
    CHECK(summaries_csv({s}).find("nan") != std::string::npos);
}

TEST_CASE("summarize: median for even counts, histogram sums to count") {
    StatsSummary s = summarize(dataset_of({1, 2, 3, 40}), 10);
    CHECK(s.median_tool_calls == doctest::Approx(2.5));
    size_t total = 0;
    for (const auto& b : s.histogram) {
        CHECK(b.hi == b.lo + 10);
        total += b.count;
    }
    CHECK(total == s.count);
    CHECK(s.histogram.front().count == 3);
    CHECK(s.histogram.back().count == 1);
    CHECK(s.min_tool_calls <= s.median_tool_calls);
    CHECK(s.median_tool_calls <= static_cast<double>(s.max_tool_calls));
}

TEST_CASE("summarize: reproduces an independent single-pass stream mean to 1e-9") {
    std::mt19937_64 rng(123);
    std::vector<size_t> counts;
    for (int i = 0; i < 1000; ++i) counts.push_back(rng() % 200);
    Dataset d = dataset_of(counts);
    StatsSummary s = summarize(d);

    // Second-pass oracle in a different accumulation order.
    double sum = 0.0;
    size_t n = 0;
    for (auto it = counts.rbegin(); it != counts.rend(); ++it) {
        sum += static_cast<double>(*it);
        ++n;
    }
    const double oracle_mean = sum / static_cast<double>(n);
    CHECK(std::abs(s.mean_tool_calls - oracle_mean) <=
          1e-9 * std::max(1.0, std::abs(oracle_mean)));

    // Mean law: mean * count == exact sum.
    CHECK(s.mean_tool_calls * static_cast<double>(s.count) == doctest::Approx(sum).epsilon(1e-9));
}

TEST_CASE("summarize: shuffle invariance") {
    std::mt19937_64 rng(9);
    std::vector<size_t> counts;
    for (int i = 0; i < 200; ++i) counts.push_back(rng() % 50);
    StatsSummary a = summarize(dataset_of(counts));
    std::shuffle(counts.begin(), counts.end(), rng);
    StatsSummary b = summarize(dataset_of(counts));
    CHECK(a.to_json() == b.to_json());
}

TEST_CASE("summarize: filter interaction keeps min at or above the threshold") {
    std::mt19937_64 rng(21);
    std::vector<size_t> counts;
    for (int i = 0; i < 300; ++i) counts.push_back(rng() % 40);
    Dataset d = dataset_of(counts);
    for (size_t t : {0u, 1u, 8u, 25u}) {
        Dataset filtered = low_step_filter(d, t);
        if (filtered.items.empty()) continue;
        StatsSummary s = summarize(filtered);
        CHECK(s.min_tool_calls >= t);
    }
}

TEST_CASE("compare: reference means order the table, ties break by name") {
    std::vector<StatsSummary> rows;
    for (auto& [name, mean] : std::vector<std::pair<std::string, double>>{
             {"v1", 46.97}, {"red", 36.01}, {"v2", 64.67}}) {
        StatsSummary s;
        s.name = name;
        s.mean_defined = true;
        s.mean_tool_calls = mean;
        rows.push_back(s);
    }
    auto sorted = compare(rows);
    REQUIRE(sorted.size() == 3);
    CHECK(sorted[0].name == "v2");
    CHECK(sorted[1].name == "v1");
    CHECK(sorted[2].name == "red");

    StatsSummary tie_a, tie_b;
    tie_a.name = "zeta";
    tie_a.mean_defined = tie_b.mean_defined = true;
    tie_a.mean_tool_calls = tie_b.mean_tool_calls = 5.0;
    tie_b.name = "alpha";
    auto tied = compare({tie_a, tie_b});
    CHECK(tied[0].name == "alpha");
    CHECK(tied[1].name == "zeta");

    auto single = compare({tie_a});
    CHECK(single.size() == 1);
    CHECK_THROWS_AS(compare({}), data_error);
}

TEST_CASE("csv: fixed column header and one row per summary") {
    StatsSummary s = summarize(dataset_of({4, 6}));
    s.name = "mini";
    const std::string csv = summaries_csv({s});
    CHECK(csv.rfind("name,count,mean,min,median,max\n", 0) == 0);
    CHECK(csv.find("mini,2,5,4,5,6") != std::string::npos);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
}

TEST_CASE("svg: self-contained vector chart") {
    std::vector<StatsSummary> rows;
    StatsSummary a = summarize(dataset_of({10, 14}));
    a.name = "set_a";
    rows.push_back(a);
    const std::string svg = comparison_svg(rows);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("set_a") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("href") == std::string::npos);  // no external assets
    CHECK(svg.find("url(") == std::string::npos);
}

TEST_CASE("mean context chars tracked alongside tool calls") {
    Dataset d;
    d.items.push_back(item_with_steps(2, 100));
    d.items.push_back(item_with_steps(4, 300));
    StatsSummary s = summarize(d);
    CHECK(s.mean_context_chars == doctest::Approx(200.0));
}
