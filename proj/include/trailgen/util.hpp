#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace trailgen {

// Insertion-ordered JSON everywhere so serialized artifacts are byte-stable.
using json = nlohmann::ordered_json;

// Error categories map 1:1 onto CLI exit codes / C API status values.
enum class error_kind : int { config = 1, data = 2, upstream = 3 };

class pipeline_error : public std::runtime_error {
  public:
    pipeline_error(error_kind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}
    error_kind kind() const { return kind_; }

  private:
    error_kind kind_;
};

struct config_error : pipeline_error {
    explicit config_error(const std::string& msg) : pipeline_error(error_kind::config, msg) {}
};

struct data_error : pipeline_error {
    explicit data_error(const std::string& msg) : pipeline_error(error_kind::data, msg) {}
};

struct upstream_error : pipeline_error {
    explicit upstream_error(const std::string& msg) : pipeline_error(error_kind::upstream, msg) {}
};

// ---- text helpers ----

std::string to_lower(std::string s);
std::string trim(const std::string& s);
std::string collapse_whitespace(const std::string& s);

// Canonical answer form: case-folded, trimmed, inner whitespace collapsed,
// terminal punctuation stripped.
std::string normalize_answer(const std::string& s);

// True when `answer` normalizes equal to `gold` or any alias.
bool answers_match(const std::string& answer, const std::string& gold,
                   const std::vector<std::string>& aliases);

// Lower-cased alphanumeric runs; bytes >= 0x80 are treated as word characters
// so UTF-8 sequences stay intact.
std::vector<std::string> tokenize(const std::string& text);

// ---- hashing / seeds ----

std::uint64_t fnv1a64(const std::string& data);
std::uint64_t splitmix64(std::uint64_t x);

// Stage-local seed derived from the global seed and a stage name, so stages
// can be rerun independently without sharing RNG streams.
std::uint64_t derive_seed(std::uint64_t global_seed, const std::string& name);

std::string hex64(std::uint64_t v);

// ---- file io ----

std::string read_text_file(const std::string& path);

// Writes via a temp file in the same directory, then renames into place.
void atomic_write_text(const std::string& path, const std::string& content);

// Parses every line of a JSONL file. Errors carry "path:line:" prefixes.
// `lenient` skips malformed lines and collects their line numbers instead.
struct JsonlRecord {
    size_t line = 0;
    json value;
};

std::vector<JsonlRecord> read_jsonl_records(const std::string& path, bool lenient,
                                            std::vector<size_t>* bad_lines);
std::vector<json> read_jsonl(const std::string& path);

void write_jsonl(const std::string& path, const std::vector<json>& records);

// ---- misc ----

// Runs fn(i) for i in [0, n) on up to `workers` threads. Exceptions are
// rethrown on the caller thread. workers <= 1 runs inline.
void parallel_for(size_t n, size_t workers, const std::function<void(size_t)>& fn);

bool is_scalar(const json& v);
std::string json_kind_name(const json& v);

}  // namespace trailgen
