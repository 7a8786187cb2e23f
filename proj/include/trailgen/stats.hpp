#pragma once

#include "trailgen/filter.hpp"

namespace trailgen {

struct HistogramBucket {
    size_t lo = 0;  // inclusive
    size_t hi = 0;  // exclusive
    size_t count = 0;
};

struct StatsSummary {
    std::string name;
    size_t count = 0;
    bool mean_defined = false;  // false on the empty dataset
    double mean_tool_calls = 0.0;
    size_t min_tool_calls = 0;
    size_t max_tool_calls = 0;
    double median_tool_calls = 0.0;
    std::vector<HistogramBucket> histogram;
    double mean_context_chars = 0.0;

    json to_json() const;
};

StatsSummary summarize(const Dataset& data, size_t bucket_width = 10,
                       const std::string& name = "dataset");

// Rows ordered by mean tool calls descending, ties broken by name.
std::vector<StatsSummary> compare(std::vector<StatsSummary> summaries);

// name,count,mean,min,median,max — one row per summary, in the given order.
std::string summaries_csv(const std::vector<StatsSummary>& rows);

json comparison_json(const std::vector<StatsSummary>& rows);

// Self-contained bar chart of mean tool calls, no external assets.
std::string comparison_svg(const std::vector<StatsSummary>& rows);

}  // namespace trailgen
