#include "trailgen/tools.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "httplib.h"

namespace trailgen {

json ToolCall::to_json() const {
    json j;
    j["tool"] = tool;
    j["args"] = args;
    return j;
}

ToolCall ToolCall::from_json(const json& j) {
    ToolCall c;
    c.tool = j.at("tool").get<std::string>();
    c.args = j.value("args", json::object());
    if (!c.args.is_object()) throw data_error("tool call args must be an object");
    return c;
}

json Observation::to_json() const {
    json j;
    j["content"] = content;
    j["truncated"] = truncated;
    j["cost_chars"] = cost_chars;
    return j;
}

Observation Observation::from_json(const json& j) {
    Observation o;
    o.content = j.at("content").get<std::string>();
    o.truncated = j.at("truncated").get<bool>();
    o.cost_chars = j.at("cost_chars").get<size_t>();
    return o;
}

Observation make_observation(std::string content, size_t cap) {
    Observation o;
    o.cost_chars = content.size();
    const std::string marker = kTruncationMarker;
    if (content.size() > cap && cap > marker.size()) {
        content.resize(cap - marker.size());
        content += marker;
        o.truncated = true;
    }
    o.content = std::move(content);
    return o;
}

void ToolRegistry::add(ToolDescriptor desc, ToolFn fn) {
    if (by_name_.count(desc.name)) throw config_error("duplicate tool name '" + desc.name + "'");
    by_name_[desc.name] = descriptors_.size();
    descriptors_.push_back(std::move(desc));
    fns_.push_back(std::move(fn));
}

bool ToolRegistry::has(const std::string& name) const { return by_name_.count(name) != 0; }

void ToolRegistry::wrap(const std::string& name, std::function<Observation(Observation)> post) {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) throw config_error("cannot wrap unknown tool '" + name + "'");
    ToolFn inner = fns_[it->second];
    fns_[it->second] = [inner, post](const json& args) { return post(inner(args)); };
}

Observation ToolRegistry::dispatch(const ToolCall& call) {
    auto it = by_name_.find(call.tool);
    if (it == by_name_.end()) throw data_error("unknown tool '" + call.tool + "'");
    const ToolDescriptor& desc = descriptors_[it->second];

    for (const ArgSpec& spec : desc.args) {
        auto arg = call.args.find(spec.name);
        if (arg == call.args.end()) {
            if (spec.required) {
                throw data_error("tool '" + call.tool + "': missing required arg '" + spec.name +
                                 "'");
            }
            continue;
        }
        const json& v = arg.value();
        bool ok = (spec.kind == "string" && v.is_string()) ||
                  (spec.kind == "int" && v.is_number_integer()) ||
                  (spec.kind == "number" && v.is_number()) ||
                  (spec.kind == "bool" && v.is_boolean());
        if (!ok) {
            throw data_error("tool '" + call.tool + "': arg '" + spec.name + "' must be " +
                             spec.kind + ", got " + json_kind_name(v));
        }
    }
    for (auto arg = call.args.begin(); arg != call.args.end(); ++arg) {
        bool known = std::any_of(desc.args.begin(), desc.args.end(),
                                 [&](const ArgSpec& s) { return s.name == arg.key(); });
        if (!known) {
            throw data_error("tool '" + call.tool + "': unknown arg '" + arg.key() + "'");
        }
    }

    const auto t0 = std::chrono::steady_clock::now();
    Observation obs;
    try {
        obs = fns_[it->second](call.args);
    } catch (const pipeline_error&) {
        throw;
    } catch (const std::exception& e) {
        throw data_error("tool '" + call.tool + "' failed: " + e.what());
    }
    const auto t1 = std::chrono::steady_clock::now();

    {
        std::lock_guard<std::mutex> lock(log_->mutex);
        log_->records.push_back(CallRecord{
            call.tool, std::chrono::duration<double, std::milli>(t1 - t0).count(),
            obs.cost_chars});
    }
    return obs;
}

std::string schema_text(const std::vector<ToolDescriptor>& descriptors) {
    std::string out;
    for (const ToolDescriptor& d : descriptors) {
        out += "- " + d.name + "(";
        for (size_t i = 0; i < d.args.size(); ++i) {
            if (i) out += ", ";
            out += d.args[i].name + ": " + d.args[i].kind;
            if (!d.args[i].required) out += "?";
        }
        out += "): " + d.description + "\n";
    }
    return out;
}

std::string ToolRegistry::schema_text() const { return trailgen::schema_text(descriptors_); }

std::vector<ToolDescriptor> profile_descriptors(const std::string& profile) {
    // Descriptor-only view of make_sim_registry's inventory.
    KnowledgeGraph empty_graph;
    SimWorld empty_world = SimWorld::render(empty_graph);
    ToolEnvConfig cfg;
    return make_sim_registry(empty_graph, empty_world, cfg, profile).descriptors();
}

std::vector<CallRecord> ToolRegistry::call_log() const {
    std::lock_guard<std::mutex> lock(log_->mutex);
    return log_->records;
}

std::string format_search_results(const std::vector<SearchHit>& hits) {
    if (hits.empty()) return "No results.";
    std::string out;
    for (size_t i = 0; i < hits.size(); ++i) {
        if (i) out += '\n';
        out += "[" + hits[i].id + "] " + hits[i].title + " :: " + hits[i].snippet;
    }
    return out;
}

std::vector<NodeId> parse_result_ids(const std::string& search_observation) {
    std::vector<NodeId> ids;
    std::istringstream ss(search_observation);
    std::string line;
    while (std::getline(ss, line)) {
        if (line.size() < 3 || line[0] != '[') continue;
        size_t close = line.find(']');
        if (close == std::string::npos) continue;
        ids.push_back(line.substr(1, close - 1));
    }
    return ids;
}

// ---- calculator ----

namespace {

struct ExprParser {
    const std::string& s;
    size_t pos = 0;

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    double parse_expr() {
        double v = parse_term();
        while (true) {
            if (eat('+')) {
                v += parse_term();
            } else if (eat('-')) {
                v -= parse_term();
            } else {
                return v;
            }
        }
    }

    double parse_term() {
        double v = parse_factor();
        while (true) {
            if (eat('*')) {
                v *= parse_factor();
            } else if (eat('/')) {
                double d = parse_factor();
                if (d == 0.0) throw data_error("calculator: division by zero");
                v /= d;
            } else {
                return v;
            }
        }
    }

    double parse_factor() {
        skip_ws();
        if (eat('-')) return -parse_factor();
        if (eat('(')) {
            double v = parse_expr();
            if (!eat(')')) throw data_error("calculator: expected ')'");
            return v;
        }
        size_t start = pos;
        while (pos < s.size() &&
               (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.')) {
            ++pos;
        }
        if (pos == start) {
            throw data_error("calculator: unexpected input at offset " + std::to_string(start));
        }
        return std::stod(s.substr(start, pos - start));
    }
};

std::string format_number(double v) {
    if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.0f", v);
        return buf;
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace

double eval_arithmetic(const std::string& expr) {
    ExprParser p{expr};
    double v = p.parse_expr();
    p.skip_ws();
    if (p.pos != expr.size()) {
        throw data_error("calculator: trailing input at offset " + std::to_string(p.pos));
    }
    return v;
}

// ---- registries ----

ToolRegistry make_sim_registry(const KnowledgeGraph& graph, const SimWorld& world,
                               const ToolEnvConfig& cfg, const std::string& profile) {
    if (profile != "v1" && profile != "v2") {
        throw config_error("unknown tool profile '" + profile + "' (expected v1 or v2)");
    }
    ToolRegistry reg;

    auto search_impl = [&world, cfg](const json& args, const std::vector<std::string>& kinds) {
        const std::string query = args.at("query").get<std::string>();
        size_t top_n = cfg.search_top_n;
        if (args.contains("top_n")) {
            auto v = args.at("top_n").get<int64_t>();
            if (v < 1) throw data_error("top_n must be >= 1");
            top_n = static_cast<size_t>(v);
        }
        auto hits = world.search_kinds(query, top_n, cfg.snippet_chars, kinds);
        return make_observation(format_search_results(hits), cfg.observation_cap);
    };

    reg.add(ToolDescriptor{"search",
                           "Keyword search over the corpus; returns matching pages as "
                           "[id] title :: snippet lines.",
                           {{"query", "string", true}, {"top_n", "int", false}}},
            [search_impl](const json& args) { return search_impl(args, {}); });

    reg.add(ToolDescriptor{"open",
                           "Open a page by document id and return its full text.",
                           {{"id", "string", true}}},
            [&world, cfg](const json& args) {
                const std::string id = args.at("id").get<std::string>();
                const SimDocument* doc = world.find(id);
                if (!doc) {
                    return make_observation("No document with id '" + id + "'.",
                                            cfg.observation_cap);
                }
                return make_observation("# " + doc->title + "\n" + doc->body,
                                        cfg.observation_cap);
            });

    reg.add(ToolDescriptor{"find",
                           "Return every line of a page containing the pattern, with "
                           "line numbers.",
                           {{"id", "string", true}, {"pattern", "string", true}}},
            [&world, cfg](const json& args) {
                const std::string id = args.at("id").get<std::string>();
                const std::string pattern = args.at("pattern").get<std::string>();
                if (pattern.empty()) throw data_error("find: pattern must be nonempty");
                const SimDocument* doc = world.find(id);
                if (!doc) {
                    return make_observation("No document with id '" + id + "'.",
                                            cfg.observation_cap);
                }
                const std::string needle = to_lower(pattern);
                std::istringstream ss("# " + doc->title + "\n" + doc->body);
                std::string line;
                std::string out;
                size_t lineno = 0;
                size_t matches = 0;
                while (std::getline(ss, line)) {
                    ++lineno;
                    if (to_lower(line).find(needle) == std::string::npos) continue;
                    if (matches) out += '\n';
                    out += "L" + std::to_string(lineno) + ": " + line;
                    ++matches;
                }
                if (!matches) out = "No matches for \"" + pattern + "\".";
                return make_observation(out, cfg.observation_cap);
            });

    if (profile == "v2") {
        reg.add(ToolDescriptor{"scholar_search",
                               "Keyword search restricted to scholarly pages.",
                               {{"query", "string", true}, {"top_n", "int", false}}},
                [search_impl, cfg](const json& args) {
                    return search_impl(args, cfg.scholar_kinds);
                });

        reg.add(ToolDescriptor{"calculator",
                               "Evaluate an arithmetic expression (+, -, *, /, parentheses).",
                               {{"expression", "string", true}}},
                [cfg](const json& args) {
                    double v = eval_arithmetic(args.at("expression").get<std::string>());
                    return make_observation(format_number(v), cfg.observation_cap);
                });

        reg.add(ToolDescriptor{"archive_lookup",
                               "Look up relation records between entities, including "
                               "qualifiers. At least one filter is required.",
                               {{"src", "string", false},
                                {"dst", "string", false},
                                {"relation", "string", false}}},
                [&graph, cfg](const json& args) {
                    const std::string src = args.value("src", "");
                    const std::string dst = args.value("dst", "");
                    const std::string rel = args.value("relation", "");
                    if (src.empty() && dst.empty() && rel.empty()) {
                        throw data_error("archive_lookup: provide src, dst or relation");
                    }
                    std::string out;
                    size_t count = 0;
                    for (const Edge& e : graph.edges()) {
                        if (!src.empty() && e.src != src) continue;
                        if (!dst.empty() && e.dst != dst) continue;
                        if (!rel.empty() && e.relation != rel) continue;
                        if (count) out += '\n';
                        out += e.src + " " + e.relation + " " + e.dst + " " +
                               (e.qualifiers.empty() ? std::string("{}") : e.qualifiers.dump());
                        ++count;
                    }
                    if (!count) out = "No records.";
                    return make_observation(out, cfg.observation_cap);
                });
    }
    return reg;
}

namespace {

std::string http_get_with_retry(const std::string& url, double timeout_s, int retries) {
    size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw config_error("live tool: bad url " + url);
    size_t host_start = scheme_end + 3;
    size_t path_start = url.find('/', host_start);
    std::string host = url.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    for (int attempt = 0;; ++attempt) {
        httplib::Client client(host);
        client.set_connection_timeout(std::chrono::duration<double>(timeout_s));
        client.set_read_timeout(std::chrono::duration<double>(timeout_s));
        auto res = client.Get(path);
        if (res && res->status >= 200 && res->status < 300) return res->body;
        bool transient = !res || res->status == 429 || res->status >= 500;
        if (!transient || attempt >= retries) {
            throw upstream_error("live tool: GET " + url + " failed" +
                                 (res ? " with status " + std::to_string(res->status) : ""));
        }
    }
}

}  // namespace

ToolRegistry make_live_registry(const LiveToolConfig& cfg) {
    ToolRegistry reg;
    reg.add(ToolDescriptor{"search",
                           "Web search; returns the provider's result payload.",
                           {{"query", "string", true}, {"top_n", "int", false}}},
            [cfg](const json& args) {
                std::string url = cfg.search_url + "?q=" +
                                  httplib::detail::encode_url(args.at("query").get<std::string>());
                return make_observation(http_get_with_retry(url, cfg.timeout_s, cfg.retries),
                                        cfg.observation_cap);
            });
    reg.add(ToolDescriptor{"open",
                           "Fetch a page by URL and return its raw text.",
                           {{"id", "string", true}}},
            [cfg](const json& args) {
                return make_observation(http_get_with_retry(args.at("id").get<std::string>(),
                                                            cfg.timeout_s, cfg.retries),
                                        cfg.observation_cap);
            });
    return reg;
}

}  // namespace trailgen
