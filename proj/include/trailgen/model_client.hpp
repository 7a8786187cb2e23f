#pragma once

#include <condition_variable>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "trailgen/util.hpp"

namespace trailgen {

struct ClientConfig {
    std::string mode = "replay";  // live | record | replay
    std::string endpoint = "http://127.0.0.1:8811/v1/chat/completions";
    std::string model = "sim-model";
    double timeout_s = 30.0;
    int retries = 3;        // retry budget on transient failures
    int backoff_base_ms = 100;
    std::string auth_env = "TRAILGEN_API_KEY";
    double temperature = 0.0;
    size_t max_reply_chars = 16384;
    std::string transcript_dir = "transcripts";
    int max_inflight = 4;
};

void validate_client_config(const ClientConfig& cfg);

struct ChatMessage {
    std::string role;  // system | user | assistant | tool
    std::string content;
};

struct ChatExchange {
    std::vector<ChatMessage> messages;
    std::string reply;
    std::int64_t prompt_units = -1;
    std::int64_t reply_units = -1;
    int attempts = 1;
};

// Chat-completion transport with retry/backoff plus a record/replay store so
// the pipeline can run hermetically. Shareable across threads; concurrent
// in-flight requests are capped by cfg.max_inflight.
class ModelClient {
  public:
    explicit ModelClient(ClientConfig cfg);

    ChatExchange complete(const std::vector<ChatMessage>& messages);

    const ClientConfig& config() const { return cfg_; }

    // Stable across runs: hash of canonicalized messages + model + temperature.
    static std::string request_digest(const std::string& model, double temperature,
                                      const std::vector<ChatMessage>& messages);

    // Writes a transcript entry directly; used to build replay fixtures.
    static void store_transcript(const std::string& dir, const std::string& model,
                                 double temperature, const std::vector<ChatMessage>& messages,
                                 const std::string& reply);

  private:
    ChatExchange live_complete(const std::vector<ChatMessage>& messages);
    std::string transcript_path(const std::string& digest) const;

    ClientConfig cfg_;
    std::mutex inflight_mutex_;
    std::condition_variable inflight_cv_;
    int inflight_ = 0;
};

}  // namespace trailgen
