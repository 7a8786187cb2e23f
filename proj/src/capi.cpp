#include "trailgen/trailgen.h"

#include <cstdlib>
#include <cstring>

#include "trailgen/pipeline.hpp"

using namespace trailgen;

struct trailgen_config {
    PipelineConfig cfg;
};

struct trailgen_graph {
    KnowledgeGraph graph;
};

namespace {

thread_local std::string g_last_error;

int fail(int status, const std::string& msg) {
    g_last_error = msg;
    return status;
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
int guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return TRAILGEN_OK;
    } catch (const pipeline_error& e) {
        return fail(static_cast<int>(e.kind()), e.what());
    } catch (const std::exception& e) {
        return fail(TRAILGEN_ERR_DATA, e.what());
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void set_summary(char** out_summary, const json& summary) {
    if (out_summary) *out_summary = dup_string(summary.dump());
}

int require(bool ok, const char* what) {
    if (!ok) return fail(TRAILGEN_ERR_CONFIG, std::string("null argument: ") + what);
    return TRAILGEN_OK;
}

}  // namespace

extern "C" {

const char* trailgen_version(void) { return "0.1.0"; }

const char* trailgen_status_name(int status) {
    switch (status) {
        case TRAILGEN_OK: return "ok";
        case TRAILGEN_ERR_CONFIG: return "config_error";
        case TRAILGEN_ERR_DATA: return "data_error";
        case TRAILGEN_ERR_UPSTREAM: return "upstream_error";
    }
    return "unknown";
}

const char* trailgen_last_error(void) { return g_last_error.c_str(); }

void trailgen_string_free(char* s) { std::free(s); }

int trailgen_config_default(trailgen_config** out) {
    if (int rc = require(out, "out")) return rc;
    return guarded([&] { *out = new trailgen_config{default_config()}; });
}

int trailgen_config_load(const char* path, trailgen_config** out) {
    if (int rc = require(path && out, "path/out")) return rc;
    return guarded([&] { *out = new trailgen_config{load_config(path)}; });
}

int trailgen_config_override(trailgen_config* cfg, const char* dotted_key, const char* value) {
    if (int rc = require(cfg && dotted_key && value, "cfg/key/value")) return rc;
    return guarded([&] { apply_override(cfg->cfg, dotted_key, value); });
}

int trailgen_config_dump(const trailgen_config* cfg, char** out_json) {
    if (int rc = require(cfg && out_json, "cfg/out_json")) return rc;
    return guarded([&] { *out_json = dup_string(config_to_json(cfg->cfg).dump(2)); });
}

void trailgen_config_free(trailgen_config* cfg) { delete cfg; }

int trailgen_graph_generate(const trailgen_config* cfg, trailgen_graph** out) {
    if (int rc = require(cfg && out, "cfg/out")) return rc;
    return guarded([&] { *out = new trailgen_graph{generate_graph(cfg->cfg)}; });
}

int trailgen_graph_load(const char* path, trailgen_graph** out) {
    if (int rc = require(path && out, "path/out")) return rc;
    return guarded([&] { *out = new trailgen_graph{KnowledgeGraph::load(path)}; });
}

int trailgen_graph_save(const trailgen_graph* graph, const char* path) {
    if (int rc = require(graph && path, "graph/path")) return rc;
    return guarded([&] { graph->graph.save(path); });
}

int trailgen_graph_counts(const trailgen_graph* graph, uint64_t* nodes, uint64_t* edges) {
    if (int rc = require(graph, "graph")) return rc;
    if (nodes) *nodes = graph->graph.nodes().size();
    if (edges) *edges = graph->graph.edges().size();
    return TRAILGEN_OK;
}

void trailgen_graph_free(trailgen_graph* graph) { delete graph; }

int trailgen_synth(const trailgen_config* cfg, const trailgen_graph* graph,
                   const char* out_tasks, char** out_summary) {
    if (int rc = require(cfg && graph && out_tasks, "cfg/graph/out_tasks")) return rc;
    return guarded([&] { set_summary(out_summary, run_synth(cfg->cfg, graph->graph, out_tasks)); });
}

int trailgen_rollout(const trailgen_config* cfg, const trailgen_graph* graph,
                     const char* tasks_file, const char* out_trajectories, char** out_summary) {
    if (int rc = require(cfg && graph && tasks_file && out_trajectories, "arguments")) return rc;
    return guarded([&] {
        set_summary(out_summary,
                    run_rollout(cfg->cfg, graph->graph, tasks_file, out_trajectories));
    });
}

int trailgen_filter(const trailgen_config* cfg, const char* tasks_file,
                    const char* trajectories_file, const char* out_dataset,
                    const char* out_provenance, int lenient, char** out_summary) {
    if (int rc = require(cfg && tasks_file && trajectories_file && out_dataset && out_provenance,
                         "arguments")) {
        return rc;
    }
    return guarded([&] {
        set_summary(out_summary, run_filter(cfg->cfg, tasks_file, trajectories_file, out_dataset,
                                            out_provenance, lenient != 0));
    });
}

int trailgen_stats(const trailgen_config* cfg, const char* dataset_file, const char* name,
                   const char* refs_json, const char* out_json, const char* out_csv,
                   const char* out_svg, char** out_summary) {
    if (int rc = require(cfg && dataset_file && name && out_json && out_csv && out_svg,
                         "arguments")) {
        return rc;
    }
    return guarded([&] {
        std::vector<std::pair<std::string, double>> refs;
        if (refs_json && *refs_json) {
            json parsed;
            try {
                parsed = json::parse(refs_json);
            } catch (const json::parse_error& e) {
                throw config_error(std::string("refs_json: ") + e.what());
            }
            if (!parsed.is_array()) throw config_error("refs_json must be a JSON array");
            for (const json& r : parsed) {
                refs.emplace_back(r.at("name").get<std::string>(), r.at("mean").get<double>());
            }
        }
        set_summary(out_summary,
                    run_stats(cfg->cfg, dataset_file, name, refs, out_json, out_csv, out_svg));
    });
}

int trailgen_export(const trailgen_config* cfg, const char* dataset_file, const char* out_sft,
                    char** out_summary) {
    if (int rc = require(cfg && dataset_file && out_sft, "arguments")) return rc;
    return guarded(
        [&] { set_summary(out_summary, run_export(cfg->cfg, dataset_file, out_sft)); });
}

int trailgen_eval(const trailgen_config* cfg, const trailgen_graph* graph,
                  const char* tasks_file, const char* out_json, const char* out_csv,
                  char** out_summary) {
    if (int rc = require(cfg && graph && tasks_file && out_json && out_csv, "arguments")) return rc;
    return guarded([&] {
        set_summary(out_summary,
                    run_eval_stage(cfg->cfg, graph->graph, tasks_file, out_json, out_csv));
    });
}

}  // extern "C"
