// trailgen CLI: drives the pipeline through the shared-library C API.
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "trailgen/trailgen.h"

namespace {

using ordered_json = nlohmann::ordered_json;

struct ConfigHandle {
    trailgen_config* cfg = nullptr;
    ~ConfigHandle() { trailgen_config_free(cfg); }
};

struct GraphHandle {
    trailgen_graph* graph = nullptr;
    ~GraphHandle() { trailgen_graph_free(graph); }
};

struct Summary {
    char* text = nullptr;
    ~Summary() { trailgen_string_free(text); }
};

int report(int status, const char* stage) {
    if (status != TRAILGEN_OK) {
        std::fprintf(stderr, "trailgen %s: %s: %s\n", stage, trailgen_status_name(status),
                     trailgen_last_error());
    }
    return status;
}

void print_summary(const char* stage, const char* text) {
    if (!text) return;
    try {
        ordered_json j = ordered_json::parse(text);
        std::string line = std::string(stage) + ":";
        for (auto it = j.begin(); it != j.end(); ++it) {
            line += " " + it.key() + "=" +
                    (it.value().is_string() ? it.value().get<std::string>() : it.value().dump());
        }
        std::printf("%s\n", line.c_str());
    } catch (...) {
        std::printf("%s: %s\n", stage, text);
    }
}

std::string out_dir_of(trailgen_config* cfg) {
    Summary dump;
    if (trailgen_config_dump(cfg, &dump.text) != TRAILGEN_OK) return "out";
    try {
        return ordered_json::parse(dump.text).value("out_dir", "out");
    } catch (...) {
        return "out";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Knowledge-graph task synthesis, agent rollout, filtering and SFT export"};
    app.require_subcommand(1);

    std::string config_path;
    std::string seed_override;
    std::string workers_override;
    app.add_option("--config", config_path, "Pipeline config file (JSON, // comments allowed)");
    app.add_option("--seed", seed_override, "Override the global RNG seed");
    app.add_option("--workers", workers_override, "Override the worker count");

    std::string graph_file, tasks_file, traj_file, dataset_file, out_file, prov_file;
    std::string name = "dataset";
    std::string out_json, out_csv, out_svg;
    std::vector<std::string> refs;
    bool lenient = false;

    CLI::App* cmd_graph_gen = app.add_subcommand("graph-gen", "Generate a random knowledge graph");
    cmd_graph_gen->add_option("--out", out_file, "Output graph file");

    CLI::App* cmd_synth = app.add_subcommand("synth", "Expand subgraphs and synthesize tasks");
    cmd_synth->add_option("--graph", graph_file, "Graph file")->required();
    cmd_synth->add_option("--out", out_file, "Output task file");

    CLI::App* cmd_rollout = app.add_subcommand("rollout", "Run the agent over synthesized tasks");
    cmd_rollout->add_option("--graph", graph_file, "Graph file")->required();
    cmd_rollout->add_option("--tasks", tasks_file, "Task file")->required();
    cmd_rollout->add_option("--out", out_file, "Output trajectory file");

    CLI::App* cmd_filter = app.add_subcommand("filter", "Assemble the filtered dataset");
    cmd_filter->add_option("--tasks", tasks_file, "Task file")->required();
    cmd_filter->add_option("--trajectories", traj_file, "Trajectory file")->required();
    cmd_filter->add_option("--out", out_file, "Output dataset file");
    cmd_filter->add_option("--provenance", prov_file, "Provenance report file");
    cmd_filter->add_flag("--lenient", lenient, "Skip malformed trajectory lines");

    CLI::App* cmd_stats = app.add_subcommand("stats", "Summarize trajectory statistics");
    cmd_stats->add_option("--dataset", dataset_file, "Dataset file")->required();
    cmd_stats->add_option("--name", name, "Row name for this dataset");
    cmd_stats->add_option("--ref", refs, "Reference rows for the comparison table (name=mean)");
    cmd_stats->add_option("--out-json", out_json, "Report JSON path");
    cmd_stats->add_option("--out-csv", out_csv, "Report CSV path");
    cmd_stats->add_option("--out-svg", out_svg, "Bar chart SVG path");

    CLI::App* cmd_export = app.add_subcommand("export", "Export the dataset as SFT records");
    cmd_export->add_option("--dataset", dataset_file, "Dataset file")->required();
    cmd_export->add_option("--out", out_file, "Output SFT file");

    CLI::App* cmd_eval = app.add_subcommand("eval", "Evaluate a policy on a task set");
    cmd_eval->add_option("--graph", graph_file, "Graph file")->required();
    cmd_eval->add_option("--tasks", tasks_file, "Task or benchmark file")->required();
    cmd_eval->add_option("--out-json", out_json, "Report JSON path");
    cmd_eval->add_option("--out-csv", out_csv, "Report CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return TRAILGEN_ERR_CONFIG;
    }

    ConfigHandle cfg;
    int rc = config_path.empty() ? trailgen_config_default(&cfg.cfg)
                                 : trailgen_config_load(config_path.c_str(), &cfg.cfg);
    if (rc != TRAILGEN_OK) return report(rc, "config");
    if (!seed_override.empty()) {
        rc = trailgen_config_override(cfg.cfg, "seed", seed_override.c_str());
        if (rc != TRAILGEN_OK) return report(rc, "config");
    }
    if (!workers_override.empty()) {
        rc = trailgen_config_override(cfg.cfg, "workers", workers_override.c_str());
        if (rc != TRAILGEN_OK) return report(rc, "config");
    }

    const std::string out_dir = out_dir_of(cfg.cfg);
    auto in_out_dir = [&](const char* file) { return out_dir + "/" + file; };

    Summary summary;

    if (*cmd_graph_gen) {
        if (out_file.empty()) out_file = in_out_dir("graph.jsonl");
        GraphHandle g;
        rc = trailgen_graph_generate(cfg.cfg, &g.graph);
        if (rc != TRAILGEN_OK) return report(rc, "graph-gen");
        rc = trailgen_graph_save(g.graph, out_file.c_str());
        if (rc != TRAILGEN_OK) return report(rc, "graph-gen");
        uint64_t nodes = 0, edges = 0;
        trailgen_graph_counts(g.graph, &nodes, &edges);
        std::printf("graph-gen: nodes=%llu edges=%llu out=%s\n",
                    (unsigned long long)nodes, (unsigned long long)edges, out_file.c_str());
        return 0;
    }

    if (*cmd_synth) {
        if (out_file.empty()) out_file = in_out_dir("tasks.jsonl");
        GraphHandle g;
        rc = trailgen_graph_load(graph_file.c_str(), &g.graph);
        if (rc != TRAILGEN_OK) return report(rc, "synth");
        rc = trailgen_synth(cfg.cfg, g.graph, out_file.c_str(), &summary.text);
        if (rc != TRAILGEN_OK) return report(rc, "synth");
        print_summary("synth", summary.text);
        return 0;
    }

    if (*cmd_rollout) {
        if (out_file.empty()) out_file = in_out_dir("trajectories.jsonl");
        GraphHandle g;
        rc = trailgen_graph_load(graph_file.c_str(), &g.graph);
        if (rc != TRAILGEN_OK) return report(rc, "rollout");
        rc = trailgen_rollout(cfg.cfg, g.graph, tasks_file.c_str(), out_file.c_str(),
                              &summary.text);
        if (rc != TRAILGEN_OK) return report(rc, "rollout");
        print_summary("rollout", summary.text);
        return 0;
    }

    if (*cmd_filter) {
        if (out_file.empty()) out_file = in_out_dir("dataset.jsonl");
        if (prov_file.empty()) prov_file = in_out_dir("provenance.json");
        rc = trailgen_filter(cfg.cfg, tasks_file.c_str(), traj_file.c_str(), out_file.c_str(),
                             prov_file.c_str(), lenient ? 1 : 0, &summary.text);
        if (rc != TRAILGEN_OK) return report(rc, "filter");
        print_summary("filter", summary.text);
        return 0;
    }

    if (*cmd_stats) {
        if (out_json.empty()) out_json = in_out_dir("stats.json");
        if (out_csv.empty()) out_csv = in_out_dir("stats.csv");
        if (out_svg.empty()) out_svg = in_out_dir("stats.svg");
        ordered_json refs_json = ordered_json::array();
        for (const std::string& r : refs) {
            size_t eq = r.find('=');
            if (eq == std::string::npos) {
                std::fprintf(stderr, "trailgen stats: --ref wants name=mean, got '%s'\n",
                             r.c_str());
                return TRAILGEN_ERR_CONFIG;
            }
            try {
                refs_json.push_back(ordered_json{{"name", r.substr(0, eq)},
                                                 {"mean", std::stod(r.substr(eq + 1))}});
            } catch (...) {
                std::fprintf(stderr, "trailgen stats: bad mean in '%s'\n", r.c_str());
                return TRAILGEN_ERR_CONFIG;
            }
        }
        const std::string refs_str = refs_json.dump();
        rc = trailgen_stats(cfg.cfg, dataset_file.c_str(), name.c_str(),
                            refs.empty() ? nullptr : refs_str.c_str(), out_json.c_str(),
                            out_csv.c_str(), out_svg.c_str(), &summary.text);
        if (rc != TRAILGEN_OK) return report(rc, "stats");
        print_summary("stats", summary.text);
        return 0;
    }

    if (*cmd_export) {
        if (out_file.empty()) out_file = in_out_dir("sft.jsonl");
        rc = trailgen_export(cfg.cfg, dataset_file.c_str(), out_file.c_str(), &summary.text);
        if (rc != TRAILGEN_OK) return report(rc, "export");
        print_summary("export", summary.text);
        return 0;
    }

    if (*cmd_eval) {
        if (out_json.empty()) out_json = in_out_dir("eval.json");
        if (out_csv.empty()) out_csv = in_out_dir("eval.csv");
        GraphHandle g;
        rc = trailgen_graph_load(graph_file.c_str(), &g.graph);
        if (rc != TRAILGEN_OK) return report(rc, "eval");
        rc = trailgen_eval(cfg.cfg, g.graph, tasks_file.c_str(), out_json.c_str(),
                           out_csv.c_str(), &summary.text);
        if (rc != TRAILGEN_OK) return report(rc, "eval");
        print_summary("eval", summary.text);
        return 0;
    }

    return TRAILGEN_ERR_CONFIG;
}
