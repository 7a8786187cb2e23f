#include "trailgen/eval.hpp"

#include <sstream>

#include "trailgen/prompts.hpp"

namespace trailgen {

void validate_eval_config(const EvalConfig& cfg) {
    if (cfg.trials < 1) throw config_error("eval: trials must be >= 1");
    if (cfg.judge != "normalized_exact" && cfg.judge != "model") {
        throw config_error("eval: judge must be 'normalized_exact' or 'model'");
    }
    validate_budget(cfg.budget);
}

Observation mask_links(const Observation& obs, const std::vector<std::string>& patterns) {
    std::vector<std::string> lowered;
    lowered.reserve(patterns.size());
    for (const std::string& p : patterns) lowered.push_back(to_lower(p));

    std::string out;
    bool any_masked = false;
    std::istringstream ss(obs.content);
    std::string line;
    bool first = true;
    while (std::getline(ss, line)) {
        const std::string folded = to_lower(line);
        bool hit = false;
        for (const std::string& p : lowered) {
            if (!p.empty() && folded.find(p) != std::string::npos) {
                hit = true;
                break;
            }
        }
        if (!first) out += '\n';
        out += hit ? kMaskPlaceholder : line;
        any_masked = any_masked || hit;
        first = false;
    }
    if (!any_masked) return obs;

    Observation masked;
    masked.content = std::move(out);
    masked.truncated = obs.truncated;
    masked.cost_chars = masked.content.size();
    return masked;
}

Verdict judge_answer(const std::string& answer, const std::string& gold,
                     const std::vector<std::string>& aliases, const std::string& mode,
                     ModelClient* judge_client) {
    if (mode == "normalized_exact") {
        if (gold.empty()) throw data_error("judge: gold answer is empty");
        return answers_match(answer, gold, aliases) ? Verdict::correct : Verdict::incorrect;
    }
    if (mode != "model") throw config_error("judge: unknown mode '" + mode + "'");
    if (!judge_client) throw config_error("judge: model mode needs a client");

    std::vector<ChatMessage> messages;
    messages.push_back({"system", "You judge answers. Reply with exactly one word."});
    messages.push_back({"user", render_template(prompt_template("judge_v1"),
                                                {{"gold", gold}, {"answer", answer}})});
    ChatExchange ex = judge_client->complete(messages);
    const std::string verdict = normalize_answer(ex.reply);
    if (verdict == "yes") return Verdict::correct;
    if (verdict == "no") return Verdict::incorrect;
    return Verdict::unjudged;
}

json EvalReport::to_json() const {
    json j;
    j["total_tasks"] = total_tasks;
    j["trials"] = trials;
    j["correct"] = correct;
    j["incorrect"] = incorrect;
    j["unjudged"] = unjudged;
    j["failed"] = failed;
    j["accuracy"] = accuracy;
    j["mean_tool_calls"] = mean_tool_calls;
    json tb = json::object();
    for (const auto& [name, count] : terminated_by_counts) tb[name] = count;
    j["terminated_by"] = tb;
    json results = json::array();
    for (const TaskResult& r : per_task) {
        results.push_back(json{{"task_id", r.task_id},
                               {"trial", r.trial},
                               {"verdict", r.verdict},
                               {"answer", r.answer},
                               {"tool_calls", r.tool_calls},
                               {"terminated_by", r.terminated_by}});
    }
    j["results"] = results;
    return j;
}

std::string EvalReport::summary_csv() const {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%zu,%d,%zu,%zu,%zu,%zu,%.6g,%.6g\n", total_tasks, trials,
                  correct, incorrect, unjudged, failed, accuracy, mean_tool_calls);
    return std::string("total_tasks,trials,correct,incorrect,unjudged,failed,accuracy,"
                       "mean_tool_calls\n") +
           buf;
}

EvalReport run_eval(const std::vector<TaskSpec>& tasks, const PolicyFactory& make_policy,
                    ToolRegistry& registry, const EvalConfig& cfg, ModelClient* judge_client,
                    size_t workers) {
    validate_eval_config(cfg);
    if (tasks.empty()) throw data_error("eval: no tasks");

    for (const char* tool : {"search", "scholar_search"}) {
        if (registry.has(tool)) {
            auto patterns = cfg.mask_patterns;
            registry.wrap(tool,
                          [patterns](Observation o) { return mask_links(o, patterns); });
        }
    }

    const size_t runs = tasks.size() * static_cast<size_t>(cfg.trials);
    std::vector<TaskResult> results(runs);

    parallel_for(runs, workers, [&](size_t run) {
        const TaskSpec& task = tasks[run / cfg.trials];
        TaskResult& r = results[run];
        r.task_id = task.task_id;
        r.trial = static_cast<int>(run % cfg.trials);
        try {
            auto policy = make_policy(task);
            Trajectory traj = run_episode(task, *policy, registry, cfg.budget);
            r.answer = traj.answer;
            r.tool_calls = traj.tool_call_count;
            r.terminated_by = terminated_by_name(traj.terminated_by);
            if (traj.terminated_by == TerminatedBy::policy_failure) {
                r.verdict = "failed";
            } else {
                switch (judge_answer(traj.answer, task.gold_answer, task.gold_aliases, cfg.judge,
                                     judge_client)) {
                    case Verdict::correct: r.verdict = "correct"; break;
                    case Verdict::incorrect: r.verdict = "incorrect"; break;
                    case Verdict::unjudged: r.verdict = "unjudged"; break;
                }
            }
        } catch (const std::exception& e) {
            r.verdict = "failed";
            r.terminated_by = "policy_failure";
            r.answer = std::string("[error] ") + e.what();
        }
    });

    EvalReport report;
    report.total_tasks = tasks.size();
    report.trials = cfg.trials;
    double t_sum = 0.0;
    for (const TaskResult& r : results) {
        if (r.verdict == "correct") ++report.correct;
        else if (r.verdict == "incorrect") ++report.incorrect;
        else if (r.verdict == "unjudged") ++report.unjudged;
        else ++report.failed;
        ++report.terminated_by_counts[r.terminated_by];
        t_sum += static_cast<double>(r.tool_calls);
    }
    report.accuracy = static_cast<double>(report.correct) / static_cast<double>(runs);
    report.mean_tool_calls = t_sum / static_cast<double>(runs);
    report.per_task = std::move(results);
    return report;
}

std::vector<TaskSpec> read_benchmark_tasks(const std::string& path) {
    std::vector<TaskSpec> out;
    for (const JsonlRecord& rec : read_jsonl_records(path, false, nullptr)) {
        const json& j = rec.value;
        TaskSpec t;
        try {
            t.task_id = j.at("id").get<std::string>();
            t.question = j.at("question").get<std::string>();
            t.gold_answer = j.at("gold").get<std::string>();
            t.gold_aliases = j.value("aliases", std::vector<std::string>{});
        } catch (const json::exception& e) {
            throw data_error(path + ":" + std::to_string(rec.line) + ": " + e.what());
        }
        if (t.task_id.empty() || t.question.empty() || t.gold_answer.empty()) {
            throw data_error(path + ":" + std::to_string(rec.line) +
                             ": id, question and gold must be nonempty");
        }
        t.generator = "external";
        t.min_hops = 1;
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace trailgen
