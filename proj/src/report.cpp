#include "commonlearn/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace commonlearn {

using nlohmann::json;

json RunReport::to_json() const {
    json j;
    j["command"] = command;
    j["scenario_digest"] = scenario_digest;
    j["results"] = results;
    j["elapsed_ms"] = elapsed_ms;
    j["seeds"] = seeds;
    j["version"] = version;
    return j;
}

namespace {

std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

json state_list(const InfoStructure& info, const std::vector<std::size_t>& states) {
    json out = json::array();
    for (std::size_t s : states) out.push_back(info.state_label(s));
    return out;
}

json rational_matrix(const std::vector<std::vector<Rational>>& rows) {
    json out = json::array();
    for (const auto& r : rows) {
        json row = json::array();
        for (const auto& v : r) row.push_back(to_string(v));
        out.push_back(row);
    }
    return out;
}

}  // namespace

void CsvTable::write(std::ostream& out) const {
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << csv_cell(cells[i]);
        out << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
}

void CsvTable::write(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write(out);
}

std::string format_double(double value) {
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    if (std::isnan(value)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

json number(double value) {
    if (std::isfinite(value)) return value;
    return format_double(value);
}

json to_json(const InfoStructure& info, const Partition& p) {
    json out = json::array();
    for (const auto& cell : p.cells()) out.push_back(state_list(info, cell));
    return out;
}

json to_json(const InfoStructure& info, const ValidationReport& report) {
    json j;
    j["passed"] = report.passed();
    json v = json::array();
    for (const auto& x : report.violations) {
        json e;
        e["check"] = x.check;
        if (x.state) e["state"] = info.state_label(*x.state);
        if (x.agents) e["agents"] = {x.agents->first + 1, x.agents->second + 1};
        if (!x.coordinates.empty()) e["signals"] = x.coordinates;
        e["message"] = x.message;
        v.push_back(e);
    }
    j["violations"] = v;
    return j;
}

json to_json(const InfoStructure& info, const PredictionMatrix& m) {
    json j;
    j["state"] = info.state_label(m.state);
    j["from"] = m.from + 1;
    j["to"] = m.to + 1;
    j["matrix"] = rational_matrix(m.rows);
    j["coefficient"] = to_string(m.coefficient);
    j["coefficient_value"] = to_double(m.coefficient);
    if (!m.undefined_rows.empty()) j["undefined_rows"] = m.undefined_rows;
    return j;
}

json to_json(const CountVector& c) { return c.counts; }

json to_json(const CountProfile& p) {
    json out = json::array();
    for (const auto& c : p.agents) out.push_back(c.counts);
    return out;
}

json to_json(const InfoStructure& info, const EvidenceReport& report) {
    json j;
    j["is_evident"] = report.is_evident;
    j["q"] = report.q;
    j["slack"] = report.slack;
    j["violations"] = report.violations;
    json w = json::array();
    for (const auto& x : report.witnesses) {
        json e;
        e["state"] = info.state_label(x.state);
        e["counts"] = to_json(x.profile);
        e["beliefs"] = x.beliefs;
        w.push_back(e);
    }
    j["witnesses"] = w;
    return j;
}

json to_json(const InfoStructure& info, const KlGap& gap) {
    json j;
    j["value"] = number(gap.value);
    j["positive"] = gap.positive();
    j["agent"] = gap.agent + 1;
    j["state"] = info.state_label(gap.state);
    if (gap.rival) {
        j["rival"] = info.state_label(*gap.rival);
        j["argmax"] = gap.argmax;
    }
    return j;
}

json to_json(const InfoStructure& info, const TimeThreshold& threshold) {
    json j;
    j["T"] = threshold.threshold;
    j["search_time"] = threshold.search_time;
    j["log_time"] = threshold.log_time;
    j["q_beta"] = threshold.q_beta;
    j["gap"] = number(threshold.gap);
    j["combination"] = "max";
    json certs = json::array();
    for (const auto& c : threshold.certificates) {
        json e;
        e["cell"] = state_list(info, c.cell);
        e["state"] = info.state_label(c.state);
        e["probability"] = c.probability;
        e["exceeds_q_beta"] = c.probability > threshold.q_beta;
        certs.push_back(e);
    }
    j["certificates"] = certs;
    return j;
}

json to_json(const InfoStructure& info, const BoundSet& b) {
    json j;
    j["epsilon"] = b.radius;
    j["q"] = b.q;
    j["b"] = to_json(info, b.gap);
    j["epsilon_bar"] = number(b.max_radius.value);
    j["epsilon_bar_degenerate"] = b.max_radius.degenerate;
    json alpha = json::array();
    for (const auto& e : b.exponents)
        alpha.push_back({{"agent", e.agent + 1}, {"state", info.state_label(e.state)}, {"alpha", number(e.exponent)}});
    j["alpha"] = alpha;
    j["beta_star"] = b.beta_star;
    j["beta"] = b.beta;
    j["lambda"] = to_string(b.contraction);
    j["lambda_value"] = to_double(b.contraction);
    if (b.threshold) j["threshold"] = to_json(info, *b.threshold);
    return j;
}

json to_json(const Estimate& e) {
    return {{"estimate", e.mean}, {"standard_error", e.standard_error}, {"n", e.n}, {"half_width", e.half_width}};
}

json to_json(const ConditionalPredictionReport& r) {
    json j;
    j["overall"] = to_json(r.overall);
    j["threshold"] = to_string(r.threshold);
    j["min_occupancy"] = r.min_occupancy;
    j["min_bin_frequency"] = r.min_bin_frequency ? json(*r.min_bin_frequency) : json(nullptr);
    j["bins_used"] = r.bins_used;
    j["bins_sparse"] = r.bins_sparse;
    j["paths_in_sparse_bins"] = r.paths_in_sparse_bins;
    return j;
}

}  // namespace commonlearn
