#pragma once

#include <map>
#include <optional>
#include <string>

namespace trailgen {

// Named prompt assets with {{placeholder}} substitution. Which template id a
// stage uses is part of the pipeline config.
const std::string& prompt_template(const std::string& id);

std::string render_template(const std::string& tpl,
                            const std::map<std::string, std::string>& vars);

// ```kind ... ``` blocks used in model replies and SFT content.
std::string make_fenced(const std::string& kind, const std::string& content);
size_t count_fenced(const std::string& text, const std::string& kind);

// Content of the last fenced block of `kind`; `before` receives the text
// preceding the fence (without the joining blank line).
std::optional<std::string> extract_fenced(const std::string& text, const std::string& kind,
                                          std::string* before = nullptr);

}  // namespace trailgen
