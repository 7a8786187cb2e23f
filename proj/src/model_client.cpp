#include "trailgen/model_client.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <thread>

#include "httplib.h"

namespace trailgen {

namespace {

const char* kRoles[] = {"system", "user", "assistant", "tool"};

void validate_roles(const std::vector<ChatMessage>& messages) {
    for (const ChatMessage& m : messages) {
        bool ok = false;
        for (const char* r : kRoles) ok = ok || m.role == r;
        if (!ok) throw data_error("invalid chat role '" + m.role + "'");
    }
}

json canonical_request(const std::string& model, double temperature,
                       const std::vector<ChatMessage>& messages) {
    json j;
    j["model"] = model;
    j["temperature"] = temperature;
    json ms = json::array();
    for (const ChatMessage& m : messages) {
        json mj;
        mj["role"] = m.role;
        mj["content"] = m.content;
        ms.push_back(mj);
    }
    j["messages"] = ms;
    return j;
}

}  // namespace

void validate_client_config(const ClientConfig& cfg) {
    if (cfg.mode != "live" && cfg.mode != "record" && cfg.mode != "replay") {
        throw config_error("client mode must be live, record or replay");
    }
    if (cfg.retries < 0) throw config_error("client retry budget must be >= 0");
    if (cfg.backoff_base_ms < 0) throw config_error("client backoff must be >= 0");
    if (cfg.timeout_s <= 0) throw config_error("client timeout must be > 0");
    if (cfg.max_inflight < 1) throw config_error("client max_inflight must be >= 1");
}

ModelClient::ModelClient(ClientConfig cfg) : cfg_(std::move(cfg)) {
    validate_client_config(cfg_);
    if (cfg_.mode == "replay" && !std::filesystem::exists(cfg_.transcript_dir)) {
        throw config_error("replay mode requires transcript dir '" + cfg_.transcript_dir + "'");
    }
}

std::string ModelClient::request_digest(const std::string& model, double temperature,
                                        const std::vector<ChatMessage>& messages) {
    return hex64(fnv1a64(canonical_request(model, temperature, messages).dump()));
}

std::string ModelClient::transcript_path(const std::string& digest) const {
    return cfg_.transcript_dir + "/" + digest + ".json";
}

void ModelClient::store_transcript(const std::string& dir, const std::string& model,
                                   double temperature, const std::vector<ChatMessage>& messages,
                                   const std::string& reply) {
    std::filesystem::create_directories(dir);
    json j;
    j["request"] = canonical_request(model, temperature, messages);
    j["reply"] = reply;
    atomic_write_text(dir + "/" + request_digest(model, temperature, messages) + ".json",
                      j.dump(2) + "\n");
}

ChatExchange ModelClient::complete(const std::vector<ChatMessage>& messages) {
    validate_roles(messages);
    const std::string digest = request_digest(cfg_.model, cfg_.temperature, messages);

    if (cfg_.mode == "replay") {
        const std::string path = transcript_path(digest);
        if (!std::filesystem::exists(path)) {
            throw upstream_error("replay cache miss for request digest " + digest);
        }
        json j;
        try {
            j = json::parse(read_text_file(path));
        } catch (const json::parse_error& e) {
            throw data_error("corrupt transcript " + path + ": " + e.what());
        }
        ChatExchange ex;
        ex.messages = messages;
        ex.reply = j.at("reply").get<std::string>();
        return ex;
    }

    ChatExchange ex = live_complete(messages);
    if (cfg_.mode == "record") {
        store_transcript(cfg_.transcript_dir, cfg_.model, cfg_.temperature, messages, ex.reply);
    }
    return ex;
}

ChatExchange ModelClient::live_complete(const std::vector<ChatMessage>& messages) {
    {
        std::unique_lock<std::mutex> lock(inflight_mutex_);
        inflight_cv_.wait(lock, [&] { return inflight_ < cfg_.max_inflight; });
        ++inflight_;
    }
    struct Release {
        ModelClient* c;
        ~Release() {
            {
                std::lock_guard<std::mutex> lock(c->inflight_mutex_);
                --c->inflight_;
            }
            c->inflight_cv_.notify_one();
        }
    } release{this};

    size_t scheme_end = cfg_.endpoint.find("://");
    if (scheme_end == std::string::npos) {
        throw config_error("bad endpoint url: " + cfg_.endpoint);
    }
    size_t path_start = cfg_.endpoint.find('/', scheme_end + 3);
    const std::string base =
        path_start == std::string::npos ? cfg_.endpoint : cfg_.endpoint.substr(0, path_start);
    const std::string path =
        path_start == std::string::npos ? "/" : cfg_.endpoint.substr(path_start);

    json req = canonical_request(cfg_.model, cfg_.temperature, messages);
    const std::string body = req.dump();

    std::string last_error;
    for (int attempt = 0;; ++attempt) {
        httplib::Client client(base);
        client.set_connection_timeout(std::chrono::duration<double>(cfg_.timeout_s));
        client.set_read_timeout(std::chrono::duration<double>(cfg_.timeout_s));
        if (!cfg_.auth_env.empty()) {
            if (const char* token = std::getenv(cfg_.auth_env.c_str())) {
                client.set_default_headers({{"Authorization", std::string("Bearer ") + token}});
            }
        }

        auto res = client.Post(path, body, "application/json");
        if (res && res->status >= 200 && res->status < 300) {
            json j;
            try {
                j = json::parse(res->body);
            } catch (const json::parse_error& e) {
                throw upstream_error(std::string("reply is not valid JSON: ") + e.what());
            }
            if (!j.contains("choices") || j["choices"].empty() ||
                !j["choices"][0].contains("message")) {
                throw upstream_error("reply schema mismatch: no choices[0].message");
            }
            ChatExchange ex;
            ex.messages = messages;
            ex.reply = j["choices"][0]["message"].value("content", "");
            if (ex.reply.size() > cfg_.max_reply_chars) ex.reply.resize(cfg_.max_reply_chars);
            if (j.contains("usage")) {
                ex.prompt_units = j["usage"].value("prompt_tokens", -1);
                ex.reply_units = j["usage"].value("completion_tokens", -1);
            }
            ex.attempts = attempt + 1;
            return ex;
        }

        bool transient = !res || res->status == 429 || res->status >= 500;
        last_error = res ? "status " + std::to_string(res->status)
                         : "connection error (" + httplib::to_string(res.error()) + ")";
        if (!transient) {
            throw upstream_error("model endpoint returned non-retryable " + last_error);
        }
        if (attempt >= cfg_.retries) {
            throw upstream_error("model endpoint failed after " + std::to_string(attempt + 1) +
                                 " attempts: " + last_error);
        }
        std::this_thread::sleep_for(
            std::chrono::milliseconds(cfg_.backoff_base_ms * (1LL << attempt)));
    }
}

}  // namespace trailgen
