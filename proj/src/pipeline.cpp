#include "trailgen/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <set>

#include "trailgen/oracles.hpp"
#include "trailgen/prompts.hpp"
#include "trailgen/sft.hpp"
#include "trailgen/stats.hpp"
#include "trailgen/task_model.hpp"
#include "trailgen/task_synth.hpp"

namespace trailgen {

namespace {

void ensure_parent_dir(const std::string& file) {
    const auto parent = std::filesystem::path(file).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
}

std::unique_ptr<ModelClient> make_client_if(const PipelineConfig& cfg, bool needed) {
    if (!needed) return nullptr;
    return std::make_unique<ModelClient>(cfg.client);
}

}  // namespace

KnowledgeGraph generate_graph(const PipelineConfig& cfg) {
    return generate_random_graph(cfg.graph_random, derive_seed(cfg.seed, "graph"));
}

json run_graph_gen(const PipelineConfig& cfg, const std::string& out_file) {
    KnowledgeGraph graph = generate_graph(cfg);
    ensure_parent_dir(out_file);
    graph.save(out_file);
    json summary;
    summary["nodes"] = graph.nodes().size();
    summary["edges"] = graph.edges().size();
    summary["out"] = out_file;
    return summary;
}

json run_synth(const PipelineConfig& cfg, const KnowledgeGraph& graph,
               const std::string& out_file) {
    const std::uint64_t stage_seed = derive_seed(cfg.seed, "synth");
    if (graph.nodes().empty()) throw data_error("synth: graph has no nodes");

    // Deterministic seed-node schedule: a seeded shuffle of all node ids,
    // wrapped if more seeds are requested than nodes exist.
    std::vector<size_t> order(graph.nodes().size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 shuffle_rng(derive_seed(stage_seed, "seed-nodes"));
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    auto client = make_client_if(cfg, cfg.generator == "model");
    const ExpandStrategy strategy = parse_strategy(cfg.strategy);

    // Indexed results keep the outcome independent of worker interleaving.
    std::vector<std::optional<TaskSpec>> results(cfg.synth_seeds);
    std::map<std::string, size_t> rejections;
    std::mutex mu;

    parallel_for(cfg.synth_seeds, cfg.workers, [&](size_t i) {
        const NodeId seed_node = graph.nodes()[order[i % order.size()]].id;
        Subgraph sub = expand(graph, seed_node, cfg.expand_budget, strategy,
                              derive_seed(stage_seed, "expand:" + std::to_string(i)));

        std::map<std::string, size_t> local_rejections;
        const size_t attempts = cfg.generator == "model" ? 1 : cfg.synth_attempts;
        for (size_t a = 0; a < attempts && !results[i]; ++a) {
            try {
                if (cfg.generator == "model") {
                    results[i] = synthesize_model(sub, graph, *client, cfg.synth_template,
                                                  cfg.difficulty);
                } else {
                    TaskSpec task = synthesize_template(
                        sub, graph, cfg.difficulty,
                        derive_seed(stage_seed,
                                    "task:" + std::to_string(i) + ":" + std::to_string(a)));
                    gate_task(graph, task, cfg.difficulty.min_hops_required);
                    results[i] = std::move(task);
                }
            } catch (const synth_rejection& e) {
                ++local_rejections[e.check];
            }
        }

        std::lock_guard<std::mutex> lock(mu);
        for (const auto& [check, n] : local_rejections) rejections[check] += n;
    });

    // First seed index wins on duplicate ids, then canonical id order.
    std::vector<TaskSpec> accepted;
    std::set<std::string> seen_ids;
    for (auto& result : results) {
        if (result && seen_ids.insert(result->task_id).second) {
            accepted.push_back(std::move(*result));
        }
    }
    std::sort(accepted.begin(), accepted.end(),
              [](const TaskSpec& a, const TaskSpec& b) { return a.task_id < b.task_id; });

    if (accepted.empty()) {
        std::string detail;
        for (const auto& [check, n] : rejections) {
            detail += " " + check + "=" + std::to_string(n);
        }
        throw data_error("synth: zero accepted tasks;" + detail);
    }

    ensure_parent_dir(out_file);
    write_tasks(out_file, accepted);

    json summary;
    summary["accepted"] = accepted.size();
    json rej = json::object();
    size_t total_rej = 0;
    for (const auto& [check, n] : rejections) {
        rej[check] = n;
        total_rej += n;
    }
    summary["rejected"] = total_rej;
    summary["rejections"] = rej;
    summary["out"] = out_file;
    return summary;
}

json run_rollout(const PipelineConfig& cfg, const KnowledgeGraph& graph,
                 const std::string& tasks_file, const std::string& out_file) {
    const std::vector<TaskSpec> tasks = read_tasks(tasks_file);
    if (tasks.empty()) throw data_error("rollout: no tasks in " + tasks_file);

    const SimWorld world = SimWorld::render(graph);
    ToolRegistry registry = make_sim_registry(graph, world, cfg.tools, cfg.tool_profile);
    auto client = make_client_if(cfg, cfg.policy == "model");

    auto roll_one = [&](const TaskSpec& task) {
        std::unique_ptr<Policy> policy;
        if (cfg.policy == "model") {
            policy = make_model_policy(*client, cfg.policy_template);
        } else {
            policy = make_oracle_policy(graph, task,
                                        cfg.oracle_style == "padded" ? OracleStyle::padded
                                                                     : OracleStyle::direct,
                                        cfg.oracle_padding);
        }
        return run_episode(task, *policy, registry, cfg.budget);
    };

    // Batched: completed batches are flushed to the temp file as they finish,
    // so an interrupted run leaves its partial output behind; the final
    // rename stays atomic.
    ensure_parent_dir(out_file);
    const std::string tmp_file = out_file + ".partial";
    std::ofstream tmp_out(tmp_file, std::ios::binary | std::ios::trunc);
    if (!tmp_out) throw data_error("cannot write file: " + tmp_file);

    std::vector<Trajectory> trajectories(tasks.size());
    const size_t batch = std::max<size_t>(cfg.workers * 8, 32);
    for (size_t begin = 0; begin < tasks.size(); begin += batch) {
        const size_t end = std::min(tasks.size(), begin + batch);
        parallel_for(end - begin, cfg.workers,
                     [&](size_t i) { trajectories[begin + i] = roll_one(tasks[begin + i]); });
        for (size_t i = begin; i < end; ++i) {
            tmp_out << trajectories[i].to_json().dump() << '\n';
        }
        tmp_out.flush();
    }
    tmp_out.close();
    if (std::rename(tmp_file.c_str(), out_file.c_str()) != 0) {
        throw data_error("cannot rename " + tmp_file + " to " + out_file);
    }

    std::map<std::string, size_t> by_termination;
    for (const Trajectory& t : trajectories) ++by_termination[terminated_by_name(t.terminated_by)];
    json summary;
    summary["trajectories"] = trajectories.size();
    json tb = json::object();
    for (const auto& [name, n] : by_termination) tb[name] = n;
    summary["terminated_by"] = tb;
    summary["out"] = out_file;
    return summary;
}

json run_filter(const PipelineConfig& cfg, const std::string& tasks_file,
                const std::string& trajectories_file, const std::string& out_items,
                const std::string& out_provenance, bool lenient) {
    const std::vector<TaskSpec> tasks = read_tasks(tasks_file);

    std::vector<Trajectory> trajectories;
    std::vector<size_t> bad_lines;
    if (lenient) {
        for (const JsonlRecord& rec : read_jsonl_records(trajectories_file, true, &bad_lines)) {
            try {
                trajectories.push_back(Trajectory::from_json(rec.value));
            } catch (const std::exception&) {
                bad_lines.push_back(rec.line);
            }
        }
        std::sort(bad_lines.begin(), bad_lines.end());
    } else {
        trajectories = read_trajectories(trajectories_file);
    }

    Dataset raw = join_dataset(tasks, trajectories);
    Dataset out = assemble(raw, cfg.filter);

    ensure_parent_dir(out_items);
    write_dataset_items(out_items, out.items);
    ensure_parent_dir(out_provenance);
    atomic_write_text(out_provenance, out.provenance.to_json().dump(2) + "\n");

    json summary = out.provenance.to_json();
    summary["malformed_lines"] = bad_lines;
    summary["out"] = out_items;
    return summary;
}

json run_stats(const PipelineConfig& cfg, const std::string& dataset_file,
               const std::string& name, const std::vector<std::pair<std::string, double>>& refs,
               const std::string& out_json, const std::string& out_csv,
               const std::string& out_svg) {
    Dataset data;
    data.items = read_dataset_items(dataset_file);

    std::vector<StatsSummary> rows;
    rows.push_back(summarize(data, cfg.stats_bucket_width, name));
    for (const auto& [ref_name, mean] : refs) {
        StatsSummary ref;
        ref.name = ref_name;
        ref.mean_defined = true;
        ref.mean_tool_calls = mean;
        rows.push_back(ref);
    }
    rows = compare(std::move(rows));

    ensure_parent_dir(out_json);
    atomic_write_text(out_json, comparison_json(rows).dump(2) + "\n");
    ensure_parent_dir(out_csv);
    atomic_write_text(out_csv, summaries_csv(rows));
    ensure_parent_dir(out_svg);
    atomic_write_text(out_svg, comparison_svg(rows));

    json summary;
    summary["rows"] = comparison_json(rows);
    summary["out_csv"] = out_csv;
    summary["out_svg"] = out_svg;
    return summary;
}

json run_export(const PipelineConfig& cfg, const std::string& dataset_file,
                const std::string& out_file) {
    Dataset data;
    data.items = read_dataset_items(dataset_file);

    const std::string system_prompt =
        render_template(prompt_template(cfg.policy_template),
                        {{"tools", schema_text(profile_descriptors(cfg.tool_profile))}});

    ensure_parent_dir(out_file);
    const size_t count = export_sft(data, out_file, system_prompt);

    json summary;
    summary["records"] = count;
    summary["out"] = out_file;
    return summary;
}

json run_eval_stage(const PipelineConfig& cfg, const KnowledgeGraph& graph,
                    const std::string& tasks_file, const std::string& out_json,
                    const std::string& out_csv) {
    // Task files may be pipeline TaskSpec records or minimal external
    // benchmark records; sniff the first record.
    std::vector<TaskSpec> tasks;
    {
        std::vector<json> records = read_jsonl(tasks_file);
        if (records.empty()) throw data_error("eval: no tasks in " + tasks_file);
        tasks = records.front().contains("task_id") ? read_tasks(tasks_file)
                                                    : read_benchmark_tasks(tasks_file);
    }

    const SimWorld world = SimWorld::render(graph);
    ToolRegistry registry = make_sim_registry(graph, world, cfg.tools, cfg.tool_profile);

    auto client = make_client_if(cfg, cfg.policy == "model" || cfg.eval.judge == "model");

    PolicyFactory factory = [&](const TaskSpec& task) -> std::unique_ptr<Policy> {
        if (cfg.policy == "model") return make_model_policy(*client, cfg.policy_template);
        return make_oracle_policy(graph, task,
                                  cfg.oracle_style == "padded" ? OracleStyle::padded
                                                               : OracleStyle::direct,
                                  cfg.oracle_padding);
    };

    EvalConfig eval_cfg = cfg.eval;
    eval_cfg.budget = cfg.budget;
    EvalReport report = run_eval(tasks, factory, registry, eval_cfg,
                                 cfg.eval.judge == "model" ? client.get() : nullptr, cfg.workers);

    ensure_parent_dir(out_json);
    atomic_write_text(out_json, report.to_json().dump(2) + "\n");
    ensure_parent_dir(out_csv);
    atomic_write_text(out_csv, report.summary_csv());

    json summary;
    summary["accuracy"] = report.accuracy;
    summary["correct"] = report.correct;
    summary["failed"] = report.failed;
    summary["mean_tool_calls"] = report.mean_tool_calls;
    summary["out"] = out_json;
    return summary;
}

}  // namespace trailgen
