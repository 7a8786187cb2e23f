#include "trailgen/filter.hpp"

#include <map>
#include <set>

namespace trailgen {

void validate_filter_config(const FilterConfig& cfg) {
    if (cfg.dedup_on != "question" && cfg.dedup_on != "question+answer") {
        throw config_error("filter: dedup_on must be 'question' or 'question+answer'");
    }
}

json DatasetItem::to_json() const {
    json j;
    j["task"] = task.to_json();
    j["trajectory"] = trajectory.to_json();
    return j;
}

DatasetItem DatasetItem::from_json(const json& j) {
    DatasetItem item;
    item.task = TaskSpec::from_json(j.at("task"));
    item.trajectory = Trajectory::from_json(j.at("trajectory"));
    return item;
}

json Provenance::to_json() const {
    json j;
    j["config"] = config;
    json stages_json = json::array();
    for (const StageCount& s : stages) {
        json sj;
        sj["name"] = s.name;
        sj["enabled"] = s.enabled;
        sj["input"] = s.input;
        sj["kept"] = s.kept;
        sj["dropped"] = s.dropped;
        stages_json.push_back(sj);
    }
    j["stages"] = stages_json;
    j["input_count"] = input_count;
    j["output_count"] = output_count;
    return j;
}

namespace {

Dataset filtered(const Dataset& data, const std::string& stage,
                 const std::function<bool(const DatasetItem&)>& keep) {
    Dataset out;
    out.provenance = data.provenance;
    for (const DatasetItem& item : data.items) {
        if (keep(item)) out.items.push_back(item);
    }
    StageCount sc;
    sc.name = stage;
    sc.input = data.items.size();
    sc.kept = out.items.size();
    sc.dropped = sc.input - sc.kept;
    out.provenance.stages.push_back(sc);
    out.provenance.output_count = out.items.size();
    return out;
}

}  // namespace

Dataset join_dataset(const std::vector<TaskSpec>& tasks,
                     const std::vector<Trajectory>& trajectories) {
    std::map<std::string, const TaskSpec*> by_id;
    for (const TaskSpec& t : tasks) by_id[t.task_id] = &t;
    Dataset out;
    for (const Trajectory& traj : trajectories) {
        auto it = by_id.find(traj.task_id);
        if (it == by_id.end()) {
            throw data_error("trajectory references unknown task '" + traj.task_id + "'");
        }
        out.items.push_back(DatasetItem{*it->second, traj});
    }
    out.provenance.input_count = out.items.size();
    out.provenance.output_count = out.items.size();
    return out;
}

Dataset low_step_filter(const Dataset& data, size_t t_min) {
    return filtered(data, "low_step", [t_min](const DatasetItem& item) {
        return trajectory_steps(item.trajectory) >= t_min;
    });
}

Dataset correctness_filter(const Dataset& data) {
    return filtered(data, "correctness", [](const DatasetItem& item) {
        return item.trajectory.terminated_by == TerminatedBy::answer &&
               answers_match(item.trajectory.answer, item.task.gold_answer,
                             item.task.gold_aliases);
    });
}

Dataset dedup(const Dataset& data, const std::string& key) {
    std::set<std::string> seen;
    return filtered(data, "dedup", [&](const DatasetItem& item) {
        std::string k = normalize_answer(item.task.question);
        if (key == "question+answer") k += "\x1f" + normalize_answer(item.trajectory.answer);
        return seen.insert(k).second;
    });
}

Dataset assemble(const Dataset& raw, const FilterConfig& cfg) {
    validate_filter_config(cfg);
    Dataset cur = raw;
    cur.provenance.input_count = raw.items.size();
    cur.provenance.config = json{{"t_min", cfg.t_min},
                                 {"require_correct", cfg.require_correct},
                                 {"dedup_on", cfg.dedup_on}};
    cur.provenance.stages.clear();

    if (cfg.require_correct) {
        cur = correctness_filter(cur);
    } else {
        StageCount sc;
        sc.name = "correctness";
        sc.enabled = false;
        sc.input = cur.items.size();
        sc.kept = cur.items.size();
        cur.provenance.stages.push_back(sc);
    }
    cur = low_step_filter(cur, cfg.t_min);
    cur = dedup(cur, cfg.dedup_on);
    cur.provenance.output_count = cur.items.size();
    return cur;
}

std::vector<DatasetItem> read_dataset_items(const std::string& path) {
    std::vector<DatasetItem> out;
    for (const JsonlRecord& rec : read_jsonl_records(path, false, nullptr)) {
        try {
            out.push_back(DatasetItem::from_json(rec.value));
        } catch (const std::exception& e) {
            throw data_error(path + ":" + std::to_string(rec.line) + ": " + e.what());
        }
    }
    return out;
}

void write_dataset_items(const std::string& path, const std::vector<DatasetItem>& items) {
    std::vector<json> records;
    records.reserve(items.size());
    for (const DatasetItem& item : items) records.push_back(item.to_json());
    write_jsonl(path, records);
}

}  // namespace trailgen
