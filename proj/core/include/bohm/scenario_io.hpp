#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "bohm/scenario.hpp"

namespace bohm {

struct ParseResult {
  ScenarioSpec spec;
  /// "section.key" for every value that was not given and took its default.
  std::vector<std::string> defaulted;
};

/// Parses the line-oriented scenario format (see docs/scenario-format.md) and
/// validates the result. Throws ScenarioError: syntax and unknown_key errors
/// carry line/column, semantic errors come from validate().
ParseResult parse_scenario_file(std::string_view text);

/// Renders a spec in the same format, every value explicit, numbers with 17
/// significant digits. parse_scenario_file(render_scenario(s)).spec == s.
std::string render_scenario(const ScenarioSpec& spec);

/// Reads a file from disk and parses it. Throws std::runtime_error when the
/// file cannot be read.
ParseResult load_scenario_file(const std::string& path);

}  // namespace bohm
