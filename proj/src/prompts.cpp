#include "trailgen/prompts.hpp"

#include <stdexcept>

#include "trailgen/util.hpp"

namespace trailgen {

namespace {

const std::map<std::string, std::string>& registry() {
    static const std::map<std::string, std::string> templates = {
        {"react_v1",
         "You are a research agent. Answer the question by gathering evidence with the "
         "available tools, reasoning before every action.\n"
         "Available tools:\n{{tools}}\n"
         "Each turn, write your reasoning and then exactly one block: either\n"
         "```tool_call\n{\"tool\": \"<name>\", \"args\": {...}}\n```\n"
         "to call a tool, or\n"
         "```final_answer\n<answer>\n```\n"
         "to finish with your answer.\n"},

        {"answer_only_v1",
         "The budget is exhausted. Do not call any more tools. Give your best final answer "
         "now in a final_answer block.\n"},

        {"format_reminder_v1",
         "Your last reply was malformed. Respond with reasoning followed by exactly one "
         "```tool_call``` block or exactly one ```final_answer``` block.\n"},

        {"synth_v1",
         "You write hard multi-hop questions over a private knowledge graph.\n"
         "Graph:\n{{subgraph}}\n"
         "Write one question that needs {{hops}} relation hops to answer, and give the "
         "answer. Reply with exactly one block:\n"
         "```task\n{\"question\": \"...\", \"answer\": \"...\", \"evidence\": [\"<node id>\", "
         "...], \"relations\": [\"<relation>\", ...]}\n```\n"
         "evidence lists the node ids along the reasoning path (answer node last); "
         "relations lists the {{hops}} relation labels between them.\n"},

        {"judge_v1",
         "Judge whether the candidate answer means the same as the gold answer.\n"
         "Gold answer: {{gold}}\nCandidate answer: {{answer}}\n"
         "Reply with exactly one word: yes or no.\n"},
    };
    return templates;
}

}  // namespace

const std::string& prompt_template(const std::string& id) {
    auto it = registry().find(id);
    if (it == registry().end()) throw config_error("unknown prompt template '" + id + "'");
    return it->second;
}

std::string render_template(const std::string& tpl,
                            const std::map<std::string, std::string>& vars) {
    std::string out = tpl;
    for (const auto& [key, value] : vars) {
        const std::string needle = "{{" + key + "}}";
        size_t pos = 0;
        while ((pos = out.find(needle, pos)) != std::string::npos) {
            out.replace(pos, needle.size(), value);
            pos += value.size();
        }
    }
    return out;
}

std::string make_fenced(const std::string& kind, const std::string& content) {
    return "```" + kind + "\n" + content + "\n```";
}

namespace {

// Finds the last well-formed fence of `kind`; returns npos if none.
size_t find_last_fence(const std::string& text, const std::string& open) {
    size_t best = std::string::npos;
    size_t pos = 0;
    while ((pos = text.find(open, pos)) != std::string::npos) {
        size_t close = text.find("\n```", pos + open.size());
        if (close != std::string::npos) best = pos;
        pos += open.size();
    }
    return best;
}

}  // namespace

size_t count_fenced(const std::string& text, const std::string& kind) {
    const std::string open = "```" + kind + "\n";
    size_t count = 0;
    size_t pos = 0;
    while ((pos = text.find(open, pos)) != std::string::npos) {
        ++count;
        pos += open.size();
    }
    return count;
}

std::optional<std::string> extract_fenced(const std::string& text, const std::string& kind,
                                          std::string* before) {
    const std::string open = "```" + kind + "\n";
    size_t pos = find_last_fence(text, open);
    if (pos == std::string::npos) return std::nullopt;
    size_t body_start = pos + open.size();
    size_t close = text.find("\n```", body_start);
    if (close == std::string::npos) return std::nullopt;
    if (before) {
        size_t end = pos;
        while (end > 0 && (text[end - 1] == '\n' || text[end - 1] == ' ')) --end;
        *before = text.substr(0, end);
    }
    return text.substr(body_start, close - body_start);
}

}  // namespace trailgen
