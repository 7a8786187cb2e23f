#include "trailgen/sft.hpp"

#include <fstream>

#include "trailgen/prompts.hpp"

namespace trailgen {

namespace {

void check_exportable(const DatasetItem& item) {
    const Trajectory& t = item.trajectory;
    if (t.tool_call_count != t.steps.size()) {
        throw data_error("refusing to export '" + t.task_id + "': tool_call_count != |steps|");
    }
    if (t.terminated_by == TerminatedBy::answer && t.answer.empty()) {
        throw data_error("refusing to export '" + t.task_id +
                         "': answered trajectory with empty answer");
    }
}

}  // namespace

json sft_record(const DatasetItem& item, const std::string& system_prompt) {
    check_exportable(item);
    const Trajectory& traj = item.trajectory;

    json messages = json::array();
    messages.push_back(json{{"role", "system"}, {"content", system_prompt}});
    messages.push_back(json{{"role", "user"}, {"content", item.task.question}});

    json loss_mask = json::array();
    loss_mask.push_back(0);
    loss_mask.push_back(0);

    for (const Step& s : traj.steps) {
        json assistant;
        assistant["role"] = "assistant";
        assistant["content"] =
            s.reasoning + "\n\n" + make_fenced("tool_call", s.action.to_json().dump());
        assistant["tool_call"] = s.action.to_json();
        messages.push_back(assistant);
        loss_mask.push_back(1);

        json tool;
        tool["role"] = "tool";
        tool["content"] = s.observation.content;
        tool["obs"] = json{{"truncated", s.observation.truncated},
                           {"cost_chars", s.observation.cost_chars}};
        messages.push_back(tool);
        loss_mask.push_back(0);
    }

    json final_msg;
    final_msg["role"] = "assistant";
    final_msg["content"] =
        traj.final_reasoning + "\n\n" + make_fenced("final_answer", traj.answer);
    messages.push_back(final_msg);
    loss_mask.push_back(1);

    json meta;
    meta["task_id"] = traj.task_id;
    meta["tool_calls"] = traj.tool_call_count;
    meta["generator"] = item.task.generator;
    meta["terminated_by"] = terminated_by_name(traj.terminated_by);
    meta["context_chars_used"] = traj.context_chars_used;
    meta["answer"] = traj.answer;
    meta["loss_mask"] = loss_mask;
    meta["loss_mask_note"] =
        "hint: train on assistant messages; observation-token masking is the trainer's call";
    meta["task"] = item.task.to_json();

    json record;
    record["format_version"] = kSftFormatVersion;
    record["messages"] = messages;
    record["meta"] = meta;

    if (!sft_grammar_ok(record)) {
        throw data_error("refusing to export '" + traj.task_id + "': grammar violation");
    }
    return record;
}

std::optional<size_t> sft_role_violation(const json& record) {
    if (!record.is_object() || !record.contains("messages") || !record["messages"].is_array()) {
        return 0;
    }
    const json& messages = record["messages"];
    const size_t n = messages.size();
    for (size_t i = 0; i < n; ++i) {
        if (!messages[i].is_object() || !messages[i].contains("role") ||
            !messages[i]["role"].is_string()) {
            return i;
        }
        const std::string role = messages[i]["role"].get<std::string>();
        std::string expected;
        if (i == 0) {
            expected = "system";
        } else if (i == 1) {
            expected = "user";
        } else {
            expected = (i - 2) % 2 == 0 ? "assistant" : "tool";
        }
        if (role != expected) return i;
    }
    // Must end on the final assistant message: at least s u a, odd length.
    if (n < 3 || n % 2 == 0) return n;
    return std::nullopt;
}

DatasetItem sft_record_to_item(const json& record) {
    if (record.value("format_version", -1) != kSftFormatVersion) {
        throw data_error("unsupported or missing format_version");
    }
    if (auto violation = sft_role_violation(record)) {
        throw data_error("role-sequence grammar violation at message index " +
                         std::to_string(*violation));
    }

    const json& messages = record["messages"];
    const json& meta = record.at("meta");

    DatasetItem item;
    item.task = TaskSpec::from_json(meta.at("task"));

    Trajectory traj;
    traj.task_id = meta.at("task_id").get<std::string>();
    traj.terminated_by = parse_terminated_by(meta.at("terminated_by").get<std::string>());
    traj.context_chars_used = meta.at("context_chars_used").get<size_t>();

    const size_t n_steps = (messages.size() - 3) / 2;
    for (size_t i = 0; i < n_steps; ++i) {
        const json& assistant = messages[2 + 2 * i];
        const json& tool = messages[3 + 2 * i];
        if (!assistant.contains("tool_call")) {
            throw data_error("step assistant message " + std::to_string(2 + 2 * i) +
                             " has no tool_call field");
        }
        Step step;
        step.action = ToolCall::from_json(assistant["tool_call"]);
        std::string before;
        if (!extract_fenced(assistant.at("content").get<std::string>(), "tool_call", &before)) {
            throw data_error("step assistant message " + std::to_string(2 + 2 * i) +
                             " has no tool_call block");
        }
        step.reasoning = before;
        step.observation.content = tool.at("content").get<std::string>();
        const json& obs_meta = tool.at("obs");
        step.observation.truncated = obs_meta.at("truncated").get<bool>();
        step.observation.cost_chars = obs_meta.at("cost_chars").get<size_t>();
        traj.steps.push_back(std::move(step));
    }

    const json& final_msg = messages[messages.size() - 1];
    std::string before;
    auto answer = extract_fenced(final_msg.at("content").get<std::string>(), "final_answer",
                                 &before);
    if (!answer) throw data_error("final assistant message has no final_answer block");
    traj.final_reasoning = before;
    traj.answer = *answer;
    traj.tool_call_count = meta.at("tool_calls").get<size_t>();
    if (traj.tool_call_count != traj.steps.size()) {
        throw data_error("record '" + traj.task_id + "': tool_calls does not match step count");
    }
    if (meta.at("answer").get<std::string>() != traj.answer) {
        throw data_error("record '" + traj.task_id + "': meta answer does not match content");
    }

    item.trajectory = std::move(traj);
    return item;
}

size_t export_sft(const Dataset& data, const std::string& path,
                  const std::string& system_prompt) {
    std::string buf;
    for (const DatasetItem& item : data.items) {
        buf += sft_record(item, system_prompt).dump();
        buf += '\n';
    }
    atomic_write_text(path, buf);
    return data.items.size();
}

Dataset import_sft(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open file: " + path);
    Dataset out;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        json record;
        try {
            record = json::parse(line);
        } catch (const json::parse_error& e) {
            throw data_error(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        try {
            out.items.push_back(sft_record_to_item(record));
        } catch (const pipeline_error& e) {
            throw data_error(path + ":" + std::to_string(lineno) + ": " + e.what());
        } catch (const json::exception& e) {
            throw data_error(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    out.provenance.input_count = out.items.size();
    out.provenance.output_count = out.items.size();
    out.provenance.config = json{{"source", "sft_import"}};
    return out;
}

}  // namespace trailgen
