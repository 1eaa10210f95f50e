#pragma once

#include "commonlearn/epistemic.hpp"
#include "commonlearn/info_structure.hpp"
#include "commonlearn/report.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace commonlearn::cli {

/// Exit codes of the command-line contract.
enum Exit : int { ok = 0, parse_failure = 1, capacity_exceeded = 2, invariant_failure = 3 };

/// State looked up by label, or by 1-based number when no label matches.
std::size_t resolve_state(const InfoStructure& info, const std::string& text);
std::vector<std::size_t> resolve_states(const InfoStructure& info, const std::string& comma_list);
/// 1-based agent number to 0-based index.
std::size_t resolve_agent(const InfoStructure& info, int number);
std::vector<int> parse_int_list(const std::string& comma_list);
/// Exact radius from its decimal text ("0.05" is exactly 1/20).
Rational parse_radius(const std::string& text);

/// Where a command writes its report and any CSV tables.
struct Output {
    std::optional<std::filesystem::path> report_path;

    /// Path for a CSV table next to the report, or nullopt when the report
    /// goes to stdout.
    std::optional<std::filesystem::path> table_path(const std::string& name) const;
    void emit(const RunReport& report) const;
    /// Writes `table` beside the report and records its path in `report`.
    void attach(RunReport& report, const std::string& name, const CsvTable& table) const;
};

/// Members of `event` as a CSV table (see write_event_csv).
CsvTable event_table(const EpistemicModel& model, const EpistemicEvent& event);

/// Item of the Example 1 reproduction: a named check with its evidence.
struct ReproItem {
    std::string name;
    bool passed = false;
    nlohmann::json detail;
};

/// Runs the Example 1 reproduction items. `full` adds the slow exact-engine
/// items. Tables go through `output`.
std::vector<ReproItem> reproduce_example1(const InfoStructure& info, bool full, const Output& output,
                                          RunReport& report);

}  // namespace commonlearn::cli
