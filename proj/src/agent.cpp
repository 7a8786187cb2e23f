#include "trailgen/agent.hpp"

#include <algorithm>
#include <regex>

#include "trailgen/prompts.hpp"

namespace trailgen {

json Step::to_json() const {
    json j;
    j["reasoning"] = reasoning;
    j["action"] = action.to_json();
    j["observation"] = observation.to_json();
    return j;
}

Step Step::from_json(const json& j) {
    Step s;
    s.reasoning = j.at("reasoning").get<std::string>();
    s.action = ToolCall::from_json(j.at("action"));
    s.observation = Observation::from_json(j.at("observation"));
    return s;
}

std::string terminated_by_name(TerminatedBy t) {
    switch (t) {
        case TerminatedBy::answer: return "answer";
        case TerminatedBy::budget_exhausted: return "budget_exhausted";
        case TerminatedBy::policy_failure: return "policy_failure";
    }
    return "policy_failure";
}

TerminatedBy parse_terminated_by(const std::string& name) {
    if (name == "answer") return TerminatedBy::answer;
    if (name == "budget_exhausted") return TerminatedBy::budget_exhausted;
    if (name == "policy_failure") return TerminatedBy::policy_failure;
    throw data_error("unknown terminated_by tag '" + name + "'");
}

json Trajectory::to_json() const {
    json j;
    j["task_id"] = task_id;
    json ss = json::array();
    for (const Step& s : steps) ss.push_back(s.to_json());
    j["steps"] = ss;
    j["final_reasoning"] = final_reasoning;
    j["answer"] = answer;
    j["tool_call_count"] = tool_call_count;
    j["terminated_by"] = terminated_by_name(terminated_by);
    j["context_chars_used"] = context_chars_used;
    return j;
}

Trajectory Trajectory::from_json(const json& j) {
    Trajectory t;
    t.task_id = j.at("task_id").get<std::string>();
    for (const json& s : j.at("steps")) t.steps.push_back(Step::from_json(s));
    t.final_reasoning = j.at("final_reasoning").get<std::string>();
    t.answer = j.at("answer").get<std::string>();
    t.tool_call_count = j.at("tool_call_count").get<size_t>();
    t.terminated_by = parse_terminated_by(j.at("terminated_by").get<std::string>());
    t.context_chars_used = j.at("context_chars_used").get<size_t>();
    if (t.tool_call_count != t.steps.size()) {
        throw data_error("trajectory '" + t.task_id + "': tool_call_count != |steps|");
    }
    if (t.terminated_by == TerminatedBy::answer && t.answer.empty()) {
        throw data_error("trajectory '" + t.task_id + "': answered with empty answer");
    }
    return t;
}

bool trajectory_grammar_ok(const json& record) {
    if (!record.is_object()) return false;
    std::string word;
    const json steps = record.value("steps", json());
    if (!steps.is_array()) return false;
    for (const json& s : steps) {
        if (!s.is_object()) return false;
        if (s.contains("reasoning") && s["reasoning"].is_string()) word += 'r';
        const json& a = s.value("action", json());
        if (a.is_object() && a.contains("tool") && a["tool"].is_string() &&
            a.value("args", json()).is_object()) {
            word += 'a';
        }
        const json& o = s.value("observation", json());
        if (o.is_object() && o.contains("content") && o["content"].is_string()) word += 'o';
    }
    if (record.contains("final_reasoning") && record["final_reasoning"].is_string()) word += 'r';
    if (record.contains("answer") && record["answer"].is_string()) word += 'y';
    static const std::regex grammar("^(rao)*ry$");
    return std::regex_match(word, grammar);
}

size_t recompute_context_chars(const Trajectory& t) {
    size_t total = t.final_reasoning.size();
    for (const Step& s : t.steps) total += s.reasoning.size() + s.observation.cost_chars;
    return total;
}

std::vector<Trajectory> read_trajectories(const std::string& path) {
    std::vector<Trajectory> out;
    for (const JsonlRecord& rec : read_jsonl_records(path, false, nullptr)) {
        try {
            out.push_back(Trajectory::from_json(rec.value));
        } catch (const std::exception& e) {
            throw data_error(path + ":" + std::to_string(rec.line) + ": " + e.what());
        }
    }
    return out;
}

void write_trajectories(const std::string& path, const std::vector<Trajectory>& trajectories) {
    std::vector<json> records;
    records.reserve(trajectories.size());
    for (const Trajectory& t : trajectories) records.push_back(t.to_json());
    write_jsonl(path, records);
}

void validate_budget(const Budget& b) {
    if (b.max_tool_calls < 1) throw config_error("budget: max_tool_calls must be >= 1");
    if (b.context_chars < 1) throw config_error("budget: context_chars must be >= 1");
}

namespace {

class FunctionPolicy : public Policy {
  public:
    explicit FunctionPolicy(std::function<Decision(const PolicyContext&)> fn)
        : fn_(std::move(fn)) {}
    Decision next(const PolicyContext& ctx) override { return fn_(ctx); }

  private:
    std::function<Decision(const PolicyContext&)> fn_;
};

}  // namespace

std::unique_ptr<Policy> make_function_policy(std::function<Decision(const PolicyContext&)> fn) {
    return std::make_unique<FunctionPolicy>(std::move(fn));
}

Trajectory run_episode(const TaskSpec& task, Policy& policy, ToolRegistry& registry,
                       const Budget& budget) {
    validate_budget(budget);
    if (registry.descriptors().empty()) throw config_error("tool registry is empty");

    Trajectory traj;
    traj.task_id = task.task_id;
    const std::string schema = registry.schema_text();
    size_t context = 0;

    while (true) {
        const bool answer_only =
            traj.steps.size() >= budget.max_tool_calls || context >= budget.context_chars;

        PolicyContext ctx;
        ctx.task = &task;
        ctx.history = &traj.steps;
        ctx.tool_schema = schema;
        ctx.answer_only = answer_only;

        Decision decision;
        try {
            decision = policy.next(ctx);
            if (decision.arm == Decision::Arm::tool_call && !answer_only) {
                Observation obs = registry.dispatch(decision.call);
                context += decision.reasoning.size() + obs.cost_chars;
                traj.steps.push_back(
                    Step{decision.reasoning, decision.call, std::move(obs)});
                continue;
            }
        } catch (const pipeline_error& e) {
            traj.final_reasoning = std::string("[policy failure] ") + e.what();
            traj.answer.clear();
            traj.terminated_by = TerminatedBy::policy_failure;
            context += traj.final_reasoning.size();
            break;
        }

        traj.final_reasoning = decision.reasoning;
        context += traj.final_reasoning.size();
        if (decision.arm == Decision::Arm::final_answer && !decision.answer.empty()) {
            traj.answer = decision.answer;
            traj.terminated_by = TerminatedBy::answer;
        } else if (answer_only) {
            // Forced answer-only call came back without an answer.
            traj.answer.clear();
            traj.terminated_by = TerminatedBy::budget_exhausted;
        } else {
            traj.answer.clear();
            traj.terminated_by = TerminatedBy::policy_failure;
        }
        break;
    }

    traj.tool_call_count = traj.steps.size();
    traj.context_chars_used = context;
    return traj;
}

// ---- oracle policy ----

namespace {

enum class Verify { none, search_top, open_title, find_contains };

struct PlannedCall {
    ToolCall call;
    std::string reasoning;
    Verify verify = Verify::none;  // applied to the observation of the previous call
    std::string expect;
};

class OraclePolicy : public Policy {
  public:
    OraclePolicy(const KnowledgeGraph& graph, const TaskSpec& task, OracleStyle style,
                 size_t extra_per_hop) {
        if (task.evidence_node_ids.size() < 2) {
            throw data_error("oracle policy needs a certified evidence path for task '" +
                             task.task_id + "'");
        }
        const size_t extra = style == OracleStyle::padded ? extra_per_hop : 0;
        const auto& ev = task.evidence_node_ids;
        for (size_t hop = 0; hop + 1 < ev.size(); ++hop) {
            const Node& cur = graph.node(ev[hop]);
            const Node& next = graph.node(ev[hop + 1]);
            const std::string& rel = task.relation_path[hop];
            const size_t hop_start = plan_.size();

            for (size_t p = 0; p < extra; ++p) {
                PlannedCall pc;
                pc.call.tool = "search";
                pc.call.args["query"] = cur.label + " " + rel;
                pc.reasoning = "I should double-check the context around " + cur.label +
                               " before following the " + rel + " link.";
                plan_.push_back(std::move(pc));
            }

            std::string clue = cur.label;
            for (auto it = cur.attributes.begin(); it != cur.attributes.end(); ++it) {
                if (it.key() == "aliases") continue;
                clue += " " + (it.value().is_string() ? it.value().get<std::string>()
                                                      : it.value().dump());
            }

            PlannedCall search;
            search.call.tool = "search";
            search.call.args["query"] = clue;
            search.reasoning = "Hop " + std::to_string(hop + 1) + ": locate the page for " +
                               cur.label + ".";
            plan_.push_back(std::move(search));

            PlannedCall open;
            open.call.tool = "open";
            open.call.args["id"] = cur.id;
            open.reasoning = "Open the top result to read about " + cur.label + ".";
            open.verify = Verify::search_top;
            open.expect = cur.id;
            plan_.push_back(std::move(open));

            PlannedCall find;
            find.call.tool = "find";
            find.call.args["id"] = cur.id;
            find.call.args["pattern"] = rel;
            find.reasoning = "Scan the page for the '" + rel + "' relation.";
            find.verify = Verify::open_title;
            find.expect = cur.label;
            plan_.push_back(std::move(find));

            if (hop > 0) {
                // First call of the hop checks that the previous hop's find
                // actually surfaced this entity.
                plan_[hop_start].verify = Verify::find_contains;
                plan_[hop_start].expect = cur.label;
            }
            final_expect_ = next.label;
        }
        answer_ = task.gold_answer;
    }

    Decision next(const PolicyContext& ctx) override {
        const auto& history = *ctx.history;
        if (!history.empty() && history.size() <= plan_.size()) {
            // Check the observation produced by the previous planned call.
            size_t done = history.size();
            const Observation& last = history.back().observation;
            Verify v = done < plan_.size() ? plan_[done].verify : Verify::find_contains;
            const std::string& expect =
                done < plan_.size() ? plan_[done].expect : final_expect_;
            verify_observation(v, expect, last);
        }

        if (history.size() >= plan_.size()) {
            Decision d;
            d.arm = Decision::Arm::final_answer;
            d.reasoning = "The evidence chain is complete; the terminal entity is " + answer_ +
                          ".";
            d.answer = answer_;
            return d;
        }
        // A cut-short plan has no honest answer; keep proposing the next call
        // and let the budget terminate the episode.
        const PlannedCall& pc = plan_[history.size()];
        Decision d;
        d.arm = Decision::Arm::tool_call;
        d.reasoning = pc.reasoning;
        d.call = pc.call;
        return d;
    }

  private:
    static void verify_observation(Verify v, const std::string& expect, const Observation& obs) {
        switch (v) {
            case Verify::none:
                return;
            case Verify::search_top: {
                std::vector<NodeId> ids = parse_result_ids(obs.content);
                if (ids.empty() || ids.front() != expect) {
                    throw data_error("oracle desync: expected '" + expect +
                                     "' as the top search result");
                }
                return;
            }
            case Verify::open_title:
                if (obs.content.rfind("# " + expect, 0) != 0) {
                    throw data_error("oracle desync: opened page is not '" + expect + "'");
                }
                return;
            case Verify::find_contains:
                if (obs.content.find(expect) == std::string::npos) {
                    throw data_error("oracle desync: relation scan did not surface '" + expect +
                                     "'");
                }
                return;
        }
    }

    std::vector<PlannedCall> plan_;
    std::string final_expect_;
    std::string answer_;
};

}  // namespace

std::unique_ptr<Policy> make_oracle_policy(const KnowledgeGraph& graph, const TaskSpec& task,
                                           OracleStyle style, size_t extra_per_hop) {
    return std::make_unique<OraclePolicy>(graph, task, style, extra_per_hop);
}

// ---- model policy ----

namespace {

class ModelPolicy : public Policy {
  public:
    ModelPolicy(ModelClient& client, std::string template_id)
        : client_(client), template_id_(std::move(template_id)) {}

    Decision next(const PolicyContext& ctx) override {
        std::vector<ChatMessage> messages = render_history(ctx);
        ChatExchange ex = client_.complete(messages);
        if (auto d = parse_decision(ex.reply)) return *d;

        // One reprompt with a format reminder.
        messages.push_back({"assistant", ex.reply});
        messages.push_back({"user", prompt_template("format_reminder_v1")});
        ChatExchange retry = client_.complete(messages);
        if (auto d = parse_decision(retry.reply)) return *d;
        throw data_error("model reply malformed after reprompt");
    }

  private:
    std::vector<ChatMessage> render_history(const PolicyContext& ctx) const {
        std::vector<ChatMessage> messages;
        messages.push_back(
            {"system", render_template(prompt_template(template_id_),
                                       {{"tools", ctx.tool_schema}})});
        messages.push_back({"user", ctx.task->question});
        for (const Step& s : *ctx.history) {
            messages.push_back({"assistant",
                                s.reasoning + "\n\n" +
                                    make_fenced("tool_call", s.action.to_json().dump())});
            messages.push_back({"tool", s.observation.content});
        }
        if (ctx.answer_only) {
            messages.push_back({"user", prompt_template("answer_only_v1")});
        }
        return messages;
    }

    static std::optional<Decision> parse_decision(const std::string& reply) {
        const size_t tool_blocks = count_fenced(reply, "tool_call");
        const size_t answer_blocks = count_fenced(reply, "final_answer");
        if (tool_blocks + answer_blocks != 1) return std::nullopt;

        Decision d;
        std::string before;
        if (tool_blocks == 1) {
            auto block = extract_fenced(reply, "tool_call", &before);
            if (!block) return std::nullopt;
            json j;
            try {
                j = json::parse(*block);
                d.call = ToolCall::from_json(j);
            } catch (const std::exception&) {
                return std::nullopt;
            }
            d.arm = Decision::Arm::tool_call;
        } else {
            auto block = extract_fenced(reply, "final_answer", &before);
            if (!block) return std::nullopt;
            d.arm = Decision::Arm::final_answer;
            d.answer = trim(*block);
        }
        d.reasoning = before;
        return d;
    }

    ModelClient& client_;
    std::string template_id_;
};

}  // namespace

std::unique_ptr<Policy> make_model_policy(ModelClient& client, const std::string& template_id) {
    return std::make_unique<ModelPolicy>(client, template_id);
}

}  // namespace trailgen
