#pragma once

#include "commonlearn/info_structure.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace commonlearn {

inline constexpr int kScenarioSchemaVersion = 1;

/// Parses a scenario document. Probabilities are rational strings ("3/8")
/// or integers; decimals are accepted only when "tolerance_mode" is true.
/// Throws ParseError whose where() is a JSON pointer (or "byte N" for
/// syntax errors). Probabilistic checks are left to validate().
InfoStructure parse_scenario(std::string_view text);
InfoStructure load_scenario(const std::filesystem::path& path);

/// Throws ParseError pointing at the first failed validation check.
void require_valid(const InfoStructure& info);

/// Canonical JSON form: fixed key order, canonical rationals.
std::string serialize_scenario(const InfoStructure& info, int indent = 2);

/// SHA-256 (hex) of the compact canonical form, so formatting and key order
/// do not affect it.
std::string scenario_digest(const InfoStructure& info);

/// Path of a scenario shipped with the tool, e.g. "example1".
std::filesystem::path bundled_scenario(std::string_view name);

}  // namespace commonlearn
