#pragma once

#include "commonlearn/bounds.hpp"
#include "commonlearn/contraction.hpp"
#include "commonlearn/epistemic.hpp"
#include "commonlearn/info_structure.hpp"
#include "commonlearn/montecarlo.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace commonlearn {

/// Envelope written by every CLI command.
struct RunReport {
    std::vector<std::string> command;
    std::string scenario_digest;
    nlohmann::json results = nlohmann::json::object();
    double elapsed_ms = 0.0;
    std::vector<std::uint64_t> seeds;
    std::string version = COMMONLEARN_VERSION;

    nlohmann::json to_json() const;
};

/// Plain CSV table; cells are written verbatim, quoted when needed.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void write(std::ostream& out) const;
    void write(const std::filesystem::path& path) const;
};

/// Finite doubles as numbers, infinities as the strings "inf" / "-inf".
nlohmann::json number(double value);
/// Shortest round-trip decimal text.
std::string format_double(double value);

// JSON views of domain results. States and agents appear by label; agent
// numbers are 1-based.
nlohmann::json to_json(const InfoStructure& info, const Partition& p);
nlohmann::json to_json(const InfoStructure& info, const ValidationReport& report);
nlohmann::json to_json(const InfoStructure& info, const PredictionMatrix& m);
nlohmann::json to_json(const InfoStructure& info, const EvidenceReport& report);
nlohmann::json to_json(const InfoStructure& info, const KlGap& gap);
nlohmann::json to_json(const InfoStructure& info, const TimeThreshold& threshold);
nlohmann::json to_json(const InfoStructure& info, const BoundSet& bounds);
nlohmann::json to_json(const Estimate& e);
nlohmann::json to_json(const ConditionalPredictionReport& report);
nlohmann::json to_json(const CountVector& c);
nlohmann::json to_json(const CountProfile& p);

}  // namespace commonlearn
