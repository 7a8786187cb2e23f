#include "trailgen/config.hpp"

#include <filesystem>

namespace trailgen {

PipelineConfig default_config() { return PipelineConfig{}; }

json config_to_json(const PipelineConfig& c) {
    json j;
    j["seed"] = c.seed;
    j["workers"] = c.workers;
    j["out_dir"] = c.out_dir;

    j["graph"] = json{{"source", c.graph_source},
                      {"nodes", c.graph_random.nodes},
                      {"mean_degree", c.graph_random.mean_degree},
                      {"attrs_per_node", c.graph_random.attrs_per_node},
                      {"connected", c.graph_random.connected},
                      {"alias_prob", c.graph_random.alias_prob},
                      {"qualifier_prob", c.graph_random.qualifier_prob}};

    j["expand"] = json{{"budget", c.expand_budget},
                       {"base_budget", c.expand_base_budget},
                       {"strategy", c.strategy}};

    j["synth"] = json{{"seeds", c.synth_seeds},
                      {"generator", c.generator},
                      {"hop_count", c.difficulty.hop_count},
                      {"obfuscation_level", c.difficulty.obfuscation_level},
                      {"min_hops_required", c.difficulty.min_hops_required},
                      {"attempts_per_seed", c.synth_attempts},
                      {"template_id", c.synth_template}};

    j["tools"] = json{{"profile", c.tool_profile},
                      {"snippet_chars", c.tools.snippet_chars},
                      {"observation_cap", c.tools.observation_cap},
                      {"search_top_n", c.tools.search_top_n},
                      {"scholar_kinds", c.tools.scholar_kinds}};

    j["budget"] = json{{"max_tool_calls", c.budget.max_tool_calls},
                       {"context_chars", c.budget.context_chars},
                       {"chars_per_token", c.chars_per_token}};

    j["rollout"] = json{{"policy", c.policy},
                        {"oracle_style", c.oracle_style},
                        {"oracle_padding", c.oracle_padding},
                        {"template_id", c.policy_template}};

    j["filter"] = json{{"t_min", c.filter.t_min},
                       {"require_correct", c.filter.require_correct},
                       {"dedup_on", c.filter.dedup_on}};

    j["stats"] = json{{"bucket_width", c.stats_bucket_width}};

    j["client"] = json{{"mode", c.client.mode},
                       {"endpoint", c.client.endpoint},
                       {"model", c.client.model},
                       {"timeout_s", c.client.timeout_s},
                       {"retries", c.client.retries},
                       {"backoff_base_ms", c.client.backoff_base_ms},
                       {"auth_env", c.client.auth_env},
                       {"temperature", c.client.temperature},
                       {"max_reply_chars", c.client.max_reply_chars},
                       {"transcripts", c.client.transcript_dir},
                       {"max_inflight", c.client.max_inflight}};

    j["eval"] = json{{"mask_patterns", c.eval.mask_patterns},
                     {"judge", c.eval.judge},
                     {"trials", c.eval.trials}};
    return j;
}

namespace {

void reject_unknown_keys(const json& doc, const json& schema, const std::string& prefix) {
    if (!doc.is_object()) {
        throw config_error("config: expected an object at '" +
                           (prefix.empty() ? "<root>" : prefix) + "'");
    }
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (!schema.contains(it.key())) throw config_error("config: unknown key '" + path + "'");
        if (schema[it.key()].is_object()) reject_unknown_keys(it.value(), schema[it.key()], path);
    }
}

json deep_merge(json base, const json& overlay) {
    for (auto it = overlay.begin(); it != overlay.end(); ++it) {
        if (it.value().is_object() && base.contains(it.key()) && base[it.key()].is_object()) {
            base[it.key()] = deep_merge(base[it.key()], it.value());
        } else {
            base[it.key()] = it.value();
        }
    }
    return base;
}

template <typename T>
T field(const json& j, const std::string& section, const char* key) {
    const json& v = j.at(key);
    // nlohmann would happily wrap -3 into an unsigned field.
    if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
        if (!v.is_number_unsigned()) {
            throw config_error("config: '" + section + (section.empty() ? "" : ".") + key +
                               "' must be a non-negative integer");
        }
    }
    try {
        return v.get<T>();
    } catch (const json::exception& e) {
        throw config_error("config: bad value for '" + section + "." + key + "': " + e.what());
    }
}

}  // namespace

PipelineConfig config_from_json(const json& doc) {
    const json schema = config_to_json(PipelineConfig{});
    reject_unknown_keys(doc, schema, "");
    const json j = deep_merge(schema, doc);

    PipelineConfig c;
    c.seed = field<std::uint64_t>(j, "", "seed");
    c.workers = field<size_t>(j, "", "workers");
    c.out_dir = field<std::string>(j, "", "out_dir");

    const json& g = j["graph"];
    c.graph_source = field<std::string>(g, "graph", "source");
    c.graph_random.nodes = field<size_t>(g, "graph", "nodes");
    c.graph_random.mean_degree = field<double>(g, "graph", "mean_degree");
    c.graph_random.attrs_per_node = field<size_t>(g, "graph", "attrs_per_node");
    c.graph_random.connected = field<bool>(g, "graph", "connected");
    c.graph_random.alias_prob = field<double>(g, "graph", "alias_prob");
    c.graph_random.qualifier_prob = field<double>(g, "graph", "qualifier_prob");

    const json& e = j["expand"];
    c.expand_budget = field<size_t>(e, "expand", "budget");
    c.expand_base_budget = field<size_t>(e, "expand", "base_budget");
    c.strategy = field<std::string>(e, "expand", "strategy");

    const json& s = j["synth"];
    c.synth_seeds = field<size_t>(s, "synth", "seeds");
    c.generator = field<std::string>(s, "synth", "generator");
    c.difficulty.hop_count = field<size_t>(s, "synth", "hop_count");
    c.difficulty.obfuscation_level = field<int>(s, "synth", "obfuscation_level");
    c.difficulty.min_hops_required = field<size_t>(s, "synth", "min_hops_required");
    c.synth_attempts = field<size_t>(s, "synth", "attempts_per_seed");
    c.synth_template = field<std::string>(s, "synth", "template_id");

    const json& t = j["tools"];
    c.tool_profile = field<std::string>(t, "tools", "profile");
    c.tools.snippet_chars = field<size_t>(t, "tools", "snippet_chars");
    c.tools.observation_cap = field<size_t>(t, "tools", "observation_cap");
    c.tools.search_top_n = field<size_t>(t, "tools", "search_top_n");
    c.tools.scholar_kinds = field<std::vector<std::string>>(t, "tools", "scholar_kinds");

    const json& b = j["budget"];
    c.budget.max_tool_calls = field<size_t>(b, "budget", "max_tool_calls");
    c.budget.context_chars = field<size_t>(b, "budget", "context_chars");
    c.chars_per_token = field<size_t>(b, "budget", "chars_per_token");

    const json& r = j["rollout"];
    c.policy = field<std::string>(r, "rollout", "policy");
    c.oracle_style = field<std::string>(r, "rollout", "oracle_style");
    c.oracle_padding = field<size_t>(r, "rollout", "oracle_padding");
    c.policy_template = field<std::string>(r, "rollout", "template_id");

    const json& f = j["filter"];
    c.filter.t_min = field<size_t>(f, "filter", "t_min");
    c.filter.require_correct = field<bool>(f, "filter", "require_correct");
    c.filter.dedup_on = field<std::string>(f, "filter", "dedup_on");

    c.stats_bucket_width = field<size_t>(j["stats"], "stats", "bucket_width");

    const json& cl = j["client"];
    c.client.mode = field<std::string>(cl, "client", "mode");
    c.client.endpoint = field<std::string>(cl, "client", "endpoint");
    c.client.model = field<std::string>(cl, "client", "model");
    c.client.timeout_s = field<double>(cl, "client", "timeout_s");
    c.client.retries = field<int>(cl, "client", "retries");
    c.client.backoff_base_ms = field<int>(cl, "client", "backoff_base_ms");
    c.client.auth_env = field<std::string>(cl, "client", "auth_env");
    c.client.temperature = field<double>(cl, "client", "temperature");
    c.client.max_reply_chars = field<size_t>(cl, "client", "max_reply_chars");
    c.client.transcript_dir = field<std::string>(cl, "client", "transcripts");
    c.client.max_inflight = field<int>(cl, "client", "max_inflight");

    const json& ev = j["eval"];
    c.eval.mask_patterns = field<std::vector<std::string>>(ev, "eval", "mask_patterns");
    c.eval.judge = field<std::string>(ev, "eval", "judge");
    c.eval.trials = field<int>(ev, "eval", "trials");
    c.eval.budget = c.budget;

    validate_config(c);
    return c;
}

PipelineConfig load_config(const std::string& path) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const data_error& e) {
        throw config_error(e.what());
    }
    json doc;
    try {
        doc = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw config_error("config " + path + ": " + e.what());
    }
    return config_from_json(doc);
}

void apply_override(PipelineConfig& cfg, const std::string& dotted_key,
                    const std::string& value) {
    json doc = config_to_json(cfg);
    json* cursor = &doc;
    size_t start = 0;
    while (true) {
        size_t dot = dotted_key.find('.', start);
        const std::string part = dotted_key.substr(start, dot - start);
        if (part.empty() || !cursor->contains(part)) {
            throw config_error("config: unknown key '" + dotted_key + "'");
        }
        if (dot == std::string::npos) {
            json parsed;
            try {
                parsed = json::parse(value);
            } catch (const json::parse_error&) {
                parsed = value;  // treat as a bare string
            }
            (*cursor)[part] = parsed;
            break;
        }
        cursor = &(*cursor)[part];
        start = dot + 1;
    }
    cfg = config_from_json(doc);
}

void validate_config(const PipelineConfig& c) {
    if (c.workers < 1) throw config_error("config: workers must be >= 1");
    if (c.out_dir.empty()) throw config_error("config: out_dir must be nonempty");
    if (c.expand_budget < 1) throw config_error("config: expand.budget must be >= 1");
    parse_strategy(c.strategy);
    if (c.generator != "template" && c.generator != "model") {
        throw config_error("config: synth.generator must be 'template' or 'model'");
    }
    if (c.synth_seeds < 1) throw config_error("config: synth.seeds must be >= 1");
    if (c.synth_attempts < 1) throw config_error("config: synth.attempts_per_seed must be >= 1");
    validate_difficulty(c.difficulty);
    if (c.tool_profile != "v1" && c.tool_profile != "v2") {
        throw config_error("config: tools.profile must be 'v1' or 'v2'");
    }
    if (c.tools.observation_cap < 32) {
        throw config_error("config: tools.observation_cap must be >= 32");
    }
    if (c.tools.snippet_chars < 16) throw config_error("config: tools.snippet_chars must be >= 16");
    if (c.tools.search_top_n < 1) throw config_error("config: tools.search_top_n must be >= 1");
    validate_budget(c.budget);
    if (c.chars_per_token < 1) throw config_error("config: budget.chars_per_token must be >= 1");
    if (c.policy != "oracle" && c.policy != "model") {
        throw config_error("config: rollout.policy must be 'oracle' or 'model'");
    }
    if (c.oracle_style != "direct" && c.oracle_style != "padded") {
        throw config_error("config: rollout.oracle_style must be 'direct' or 'padded'");
    }
    validate_filter_config(c.filter);
    if (c.stats_bucket_width < 1) throw config_error("config: stats.bucket_width must be >= 1");
    validate_client_config(c.client);
    if (c.eval.trials < 1) throw config_error("config: eval.trials must be >= 1");
    if (c.eval.judge != "normalized_exact" && c.eval.judge != "model") {
        throw config_error("config: eval.judge must be 'normalized_exact' or 'model'");
    }
}

std::string out_path(const PipelineConfig& cfg, const std::string& filename) {
    return (std::filesystem::path(cfg.out_dir) / filename).string();
}

}  // namespace trailgen
