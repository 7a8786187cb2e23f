#pragma once

#include <optional>

#include "trailgen/filter.hpp"

namespace trailgen {

inline constexpr int kSftFormatVersion = 1;

// One line-delimited conversation record per dataset item:
//   system (tool schema) / user (question) / per step an assistant message
//   (reasoning + fenced tool_call block, plus a structured tool_call field)
//   and a tool message (observation), then a final assistant message
//   (final reasoning + fenced final_answer block).
// Items violating the trajectory grammar are refused, never repaired.
// Returns the number of records written.
size_t export_sft(const Dataset& data, const std::string& path,
                  const std::string& system_prompt);

// Inverse of export_sft on its own output: reproduces every task and
// trajectory field-for-field. Malformed records raise data_error with the
// line number; role-sequence violations name the offending message index.
Dataset import_sft(const std::string& path);

json sft_record(const DatasetItem& item, const std::string& system_prompt);
DatasetItem sft_record_to_item(const json& record);

// Index of the first message whose role breaks the
// "system user (assistant tool)* assistant" sequence, if any.
std::optional<size_t> sft_role_violation(const json& record);
inline bool sft_grammar_ok(const json& record) { return !sft_role_violation(record); }

}  // namespace trailgen
