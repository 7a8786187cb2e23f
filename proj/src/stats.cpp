#include "trailgen/stats.hpp"

#include <algorithm>
#include <cstdio>

namespace trailgen {

namespace {

std::string fmt_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace

json StatsSummary::to_json() const {
    json j;
    j["name"] = name;
    j["count"] = count;
    if (mean_defined) {
        j["mean_tool_calls"] = mean_tool_calls;
        j["min_tool_calls"] = min_tool_calls;
        j["max_tool_calls"] = max_tool_calls;
        j["median_tool_calls"] = median_tool_calls;
        j["mean_context_chars"] = mean_context_chars;
    } else {
        j["mean_tool_calls"] = nullptr;
    }
    json hs = json::array();
    for (const HistogramBucket& b : histogram) {
        hs.push_back(json{{"lo", b.lo}, {"hi", b.hi}, {"count", b.count}});
    }
    j["histogram"] = hs;
    return j;
}

StatsSummary summarize(const Dataset& data, size_t bucket_width, const std::string& name) {
    if (bucket_width < 1) throw config_error("stats: bucket width must be >= 1");
    StatsSummary s;
    s.name = name;
    s.count = data.items.size();
    if (s.count == 0) return s;

    std::vector<size_t> calls;
    calls.reserve(s.count);
    double sum = 0.0;
    double ctx_sum = 0.0;
    for (const DatasetItem& item : data.items) {
        const size_t t = trajectory_steps(item.trajectory);
        calls.push_back(t);
        sum += static_cast<double>(t);
        ctx_sum += static_cast<double>(item.trajectory.context_chars_used);
    }
    std::sort(calls.begin(), calls.end());

    s.mean_defined = true;
    s.mean_tool_calls = sum / static_cast<double>(s.count);
    s.mean_context_chars = ctx_sum / static_cast<double>(s.count);
    s.min_tool_calls = calls.front();
    s.max_tool_calls = calls.back();
    s.median_tool_calls =
        calls.size() % 2 == 1
            ? static_cast<double>(calls[calls.size() / 2])
            : (static_cast<double>(calls[calls.size() / 2 - 1]) +
               static_cast<double>(calls[calls.size() / 2])) /
                  2.0;

    const size_t n_buckets = calls.back() / bucket_width + 1;
    s.histogram.resize(n_buckets);
    for (size_t b = 0; b < n_buckets; ++b) {
        s.histogram[b].lo = b * bucket_width;
        s.histogram[b].hi = (b + 1) * bucket_width;
    }
    for (size_t t : calls) ++s.histogram[t / bucket_width].count;
    return s;
}

std::vector<StatsSummary> compare(std::vector<StatsSummary> summaries) {
    if (summaries.empty()) throw data_error("compare: need at least one summary");
    std::sort(summaries.begin(), summaries.end(), [](const StatsSummary& a, const StatsSummary& b) {
        const double ma = a.mean_defined ? a.mean_tool_calls : -1.0;
        const double mb = b.mean_defined ? b.mean_tool_calls : -1.0;
        if (ma != mb) return ma > mb;
        return a.name < b.name;
    });
    return summaries;
}

std::string summaries_csv(const std::vector<StatsSummary>& rows) {
    std::string out = "name,count,mean,min,median,max\n";
    for (const StatsSummary& s : rows) {
        out += s.name + "," + std::to_string(s.count) + ",";
        if (s.mean_defined) {
            out += fmt_double(s.mean_tool_calls) + "," + std::to_string(s.min_tool_calls) + "," +
                   fmt_double(s.median_tool_calls) + "," + std::to_string(s.max_tool_calls);
        } else {
            out += "nan,,,";
        }
        out += "\n";
    }
    return out;
}

json comparison_json(const std::vector<StatsSummary>& rows) {
    json j = json::array();
    for (const StatsSummary& s : rows) j.push_back(s.to_json());
    return j;
}

std::string comparison_svg(const std::vector<StatsSummary>& rows) {
    const int bar_h = 28;
    const int gap = 10;
    const int left = 150;
    const int width = 640;
    const int chart_w = width - left - 90;
    const int height = static_cast<int>(rows.size()) * (bar_h + gap) + 50;

    double max_mean = 1.0;
    for (const StatsSummary& s : rows) {
        if (s.mean_defined) max_mean = std::max(max_mean, s.mean_tool_calls);
    }

    std::string svg;
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
                  "viewBox=\"0 0 %d %d\">\n",
                  width, height, width, height);
    svg += buf;
    svg += "<style>text{font-family:sans-serif;font-size:13px;}</style>\n";
    svg += "<text x=\"10\" y=\"22\" font-weight=\"bold\">Mean tool calls per trajectory</text>\n";

    int y = 40;
    for (const StatsSummary& s : rows) {
        const double mean = s.mean_defined ? s.mean_tool_calls : 0.0;
        const int w = static_cast<int>(chart_w * mean / max_mean + 0.5);
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%d\" y=\"%d\" text-anchor=\"end\">%s</text>\n", left - 8,
                      y + bar_h / 2 + 4, s.name.c_str());
        svg += buf;
        std::snprintf(buf, sizeof(buf),
                      "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"#4878a8\"/>\n",
                      left, y, std::max(w, 1), bar_h);
        svg += buf;
        std::snprintf(buf, sizeof(buf), "<text x=\"%d\" y=\"%d\">%s</text>\n", left + w + 6,
                      y + bar_h / 2 + 4, fmt_double(mean).c_str());
        svg += buf;
        y += bar_h + gap;
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace trailgen
