#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "trailgen/graph.hpp"
#include "trailgen/sim_world.hpp"

namespace trailgen {

struct ArgSpec {
    std::string name;
    std::string kind;  // string | int | number | bool
    bool required = true;
};

struct ToolDescriptor {
    std::string name;
    std::string description;
    std::vector<ArgSpec> args;
};

struct ToolCall {
    std::string tool;
    json args = json::object();

    json to_json() const;
    static ToolCall from_json(const json& j);
};

struct Observation {
    std::string content;
    bool truncated = false;
    size_t cost_chars = 0;

    json to_json() const;
    static Observation from_json(const json& j);
};

// Applies the per-observation cap. cost_chars always reflects the full
// pre-truncation content length.
Observation make_observation(std::string content, size_t cap);

inline constexpr const char* kTruncationMarker = "\n...[truncated]";

struct ToolEnvConfig {
    size_t snippet_chars = 160;
    size_t observation_cap = 4096;
    size_t search_top_n = 5;
    std::vector<std::string> scholar_kinds = {"work", "organization"};
};

struct CallRecord {
    std::string tool;
    double latency_ms = 0;
    size_t cost_chars = 0;
};

using ToolFn = std::function<Observation(const json& args)>;

class ToolRegistry {
  public:
    void add(ToolDescriptor desc, ToolFn fn);
    bool has(const std::string& name) const;
    const std::vector<ToolDescriptor>& descriptors() const { return descriptors_; }

    // Validates args against the descriptor, invokes the tool, logs the call.
    // Throws data_error for unknown tools / bad args / wrapped tool failures.
    Observation dispatch(const ToolCall& call);

    // Post-processes this tool's observations (used for link masking).
    void wrap(const std::string& name, std::function<Observation(Observation)> post);

    // Schema block embedded in agent prompts, in registration order.
    std::string schema_text() const;

    std::vector<CallRecord> call_log() const;

  private:
    // Append-only sink; behind a pointer so the registry stays movable.
    struct CallLog {
        std::mutex mutex;
        std::vector<CallRecord> records;
    };

    std::vector<ToolDescriptor> descriptors_;
    std::map<std::string, size_t> by_name_;
    std::vector<ToolFn> fns_;
    std::shared_ptr<CallLog> log_ = std::make_shared<CallLog>();
};

// v1 profile: search / open / find. v2 adds scholar_search, calculator and
// archive_lookup. The graph and world must outlive the registry.
ToolRegistry make_sim_registry(const KnowledgeGraph& graph, const SimWorld& world,
                               const ToolEnvConfig& cfg, const std::string& profile);

// Descriptors of a profile without binding a world (e.g. to rebuild the
// prompt schema at export time).
std::vector<ToolDescriptor> profile_descriptors(const std::string& profile);
std::string schema_text(const std::vector<ToolDescriptor>& descriptors);

// Arithmetic expression evaluator behind the calculator tool
// (+, -, *, /, parentheses, unary minus). Throws data_error on bad input.
double eval_arithmetic(const std::string& expr);

// Live web adapters implementing the same search/fetch contract over HTTP.
// Defined for completeness; never exercised by the test suite.
struct LiveToolConfig {
    std::string search_url;  // query appended as ?q=
    double timeout_s = 10.0;
    int retries = 2;
    size_t observation_cap = 4096;
};

ToolRegistry make_live_registry(const LiveToolConfig& cfg);

// Result-line prefix helpers shared by the search tools and the oracle policy.
std::string format_search_results(const std::vector<SearchHit>& hits);
std::vector<NodeId> parse_result_ids(const std::string& search_observation);

}  // namespace trailgen
