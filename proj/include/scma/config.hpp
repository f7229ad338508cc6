#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "scma/netsim.hpp"

namespace scma {

/// Raised for malformed or invalid scenario files; `line` is 1-based, or 0
/// when the problem is not tied to a single line.
class ConfigError : public InvalidArgument {
 public:
  ConfigError(const std::string& source, int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

// Scenario files are INI-style: `[section]` headers and `key = value` lines,
// `#` or `;` comments. Sections are deployment, radio, scheduling and
// simulation; keys carry the ScenarioConfig field names. Omitted keys keep
// their defaults.
ScenarioConfig parse_config_text(std::string_view text, const std::string& source = "<config>");
ScenarioConfig parse_config(const std::filesystem::path& path);

/// Writes every key in canonical section order; the output re-parses to an
/// equal config.
std::string serialize_config(const ScenarioConfig& config);

/// Applies `key=value` (bare key or `section.key`) and re-validates.
void apply_override(ScenarioConfig& config, std::string_view assignment);

}  // namespace scma
