#include "commonlearn/scenario.hpp"

#include "commonlearn/errors.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <set>
#include <sstream>

namespace commonlearn {

using nlohmann::json;

namespace {

std::string pointer(const std::string& base, const std::string& key) {
    std::string escaped;
    for (char c : key) {
        if (c == '~')
            escaped += "~0";
        else if (c == '/')
            escaped += "~1";
        else
            escaped += c;
    }
    return base + "/" + escaped;
}

std::string pointer(const std::string& base, std::size_t index) { return base + "/" + std::to_string(index); }

const json& require(const json& doc, const char* key) {
    if (!doc.contains(key)) throw ParseError("", std::string("missing required key \"") + key + "\"");
    return doc.at(key);
}

Rational parse_probability(const json& v, bool decimals, const std::string& where) {
    try {
        if (v.is_string()) {
            const auto s = v.get<std::string>();
            if (is_decimal_literal(s)) {
                if (!decimals) throw ParseError(where, "decimal \"" + s + "\" needs \"tolerance_mode\": true");
                return parse_decimal(s);
            }
            return parse_rational(s);
        }
        if (v.is_number_integer()) return Rational(v.get<long>());
        if (v.is_number_float()) {
            if (!decimals) throw ParseError(where, "floating-point number needs \"tolerance_mode\": true");
            return shortest_decimal(v.get<double>());
        }
    } catch (const std::invalid_argument& e) {
        throw ParseError(where, e.what());
    }
    throw ParseError(where, "expected a probability string such as \"3/8\"");
}

std::vector<std::string> label_list(const json& v, const std::string& where) {
    if (!v.is_array()) throw ParseError(where, "expected an array of labels");
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_string()) throw ParseError(pointer(where, i), "label must be a string");
        auto s = v[i].get<std::string>();
        if (!seen.insert(s).second) throw ParseError(pointer(where, i), "duplicate label \"" + s + "\"");
        out.push_back(std::move(s));
    }
    return out;
}

// Flattens a nested array of shape `sizes` in row-major order.
void flatten(const json& v, const std::vector<int>& sizes, std::size_t depth, bool decimals, const std::string& where,
             std::vector<Rational>& out) {
    if (depth == sizes.size()) {
        out.push_back(parse_probability(v, decimals, where));
        return;
    }
    if (!v.is_array()) throw ParseError(where, "expected an array over agent " + std::to_string(depth + 1) + "'s signals");
    if (v.size() != static_cast<std::size_t>(sizes[depth]))
        throw ParseError(where, "expected " + std::to_string(sizes[depth]) + " entries, found " + std::to_string(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) flatten(v[i], sizes, depth + 1, decimals, pointer(where, i), out);
}

std::string check_pointer(const InfoStructure& info, const Violation& v) {
    if (v.check == "prior_full_support" || v.check == "prior_normalized")
        return v.state ? pointer("/prior", *v.state) : "/prior";
    if (v.check == "state_count") return "/states";
    if (v.check == "agent_count") return "/agents";
    if (v.state) return pointer("/joint", info.state_label(*v.state));
    return "";
}

json build_json(const InfoStructure& info) {
    const auto& d = info.data();
    json doc = json::object();
    doc["schema_version"] = kScenarioSchemaVersion;
    doc["states"] = d.states;
    json prior = json::array();
    for (const auto& p : d.prior) prior.push_back(to_string(p));
    doc["prior"] = prior;
    json agents = json::array();
    for (std::size_t l = 0; l < info.num_agents(); ++l) {
        json a;
        a["label"] = info.agent_label(l);
        json sig = json::array();
        for (int x = 0; x < info.alphabet_size(l); ++x) sig.push_back(info.signal_label(l, x));
        a["signals"] = sig;
        agents.push_back(a);
    }
    doc["agents"] = agents;
    json joint = json::object();
    for (std::size_t s = 0; s < info.num_states(); ++s) {
        const auto tensor = info.joint(s);
        // Build the nested array from the innermost agent outwards.
        std::vector<json> level;
        for (const auto& v : tensor) level.push_back(to_string(v));
        for (std::size_t l = info.num_agents(); l-- > 0;) {
            const auto k = static_cast<std::size_t>(info.alphabet_size(l));
            std::vector<json> up;
            for (std::size_t i = 0; i < level.size(); i += k)
                up.emplace_back(std::vector<json>(level.begin() + static_cast<long>(i),
                                                  level.begin() + static_cast<long>(i + k)));
            level = std::move(up);
        }
        joint[info.state_label(s)] = level.front();
    }
    doc["joint"] = joint;
    doc["tolerance_mode"] = d.tolerance.has_value();
    if (d.tolerance) doc["tolerance"] = *d.tolerance;
    if (d.horizon_cap) doc["horizon_cap"] = *d.horizon_cap;
    return doc;
}

}  // namespace

InfoStructure parse_scenario(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError("byte " + std::to_string(e.byte), e.what());
    }
    if (!doc.is_object()) throw ParseError("", "scenario must be a JSON object");

    const auto& version = require(doc, "schema_version");
    if (!version.is_number_integer() || version.get<int>() != kScenarioSchemaVersion)
        throw ParseError("/schema_version", "unsupported schema version (expected " +
                                                std::to_string(kScenarioSchemaVersion) + ")");

    InfoStructureData d;
    bool decimals = false;
    if (doc.contains("tolerance_mode")) {
        if (!doc["tolerance_mode"].is_boolean()) throw ParseError("/tolerance_mode", "expected true or false");
        decimals = doc["tolerance_mode"].get<bool>();
    }
    if (decimals) {
        d.tolerance = 1e-9;
        if (doc.contains("tolerance")) {
            if (!doc["tolerance"].is_number() || doc["tolerance"].get<double>() < 0)
                throw ParseError("/tolerance", "expected a nonnegative number");
            d.tolerance = doc["tolerance"].get<double>();
        }
    } else if (doc.contains("tolerance")) {
        throw ParseError("/tolerance", "\"tolerance\" requires \"tolerance_mode\": true");
    }
    if (doc.contains("horizon_cap")) {
        if (!doc["horizon_cap"].is_number_integer() || doc["horizon_cap"].get<long>() < 0)
            throw ParseError("/horizon_cap", "expected a nonnegative integer");
        d.horizon_cap = doc["horizon_cap"].get<int>();
    }

    d.states = label_list(require(doc, "states"), "/states");
    if (d.states.empty()) throw ParseError("/states", "at least one state is required");

    const auto& prior = require(doc, "prior");
    if (!prior.is_array() || prior.size() != d.states.size())
        throw ParseError("/prior", "expected one probability per state");
    for (std::size_t i = 0; i < prior.size(); ++i)
        d.prior.push_back(parse_probability(prior[i], decimals, pointer("/prior", i)));

    const auto& agents = require(doc, "agents");
    if (!agents.is_array() || agents.empty()) throw ParseError("/agents", "expected a nonempty array");
    for (std::size_t l = 0; l < agents.size(); ++l) {
        const auto where = pointer("/agents", l);
        const auto& a = agents[l];
        if (a.is_number_integer()) {
            if (a.get<long>() < 1) throw ParseError(where, "alphabet size must be at least 1");
            d.alphabet_sizes.push_back(a.get<int>());
            d.agent_labels.push_back(std::to_string(l + 1));
            std::vector<std::string> sig;
            for (int x = 0; x < a.get<int>(); ++x) sig.push_back(std::to_string(x));
            d.signal_labels.push_back(std::move(sig));
        } else if (a.is_object()) {
            if (a.contains("label") && !a["label"].is_string()) throw ParseError(pointer(where, "label"), "expected a string");
            d.agent_labels.push_back(a.contains("label") ? a["label"].get<std::string>() : std::to_string(l + 1));
            if (!a.contains("signals")) throw ParseError(where, "missing required key \"signals\"");
            auto sig = label_list(a["signals"], pointer(where, "signals"));
            if (sig.empty()) throw ParseError(pointer(where, "signals"), "alphabet must not be empty");
            d.alphabet_sizes.push_back(static_cast<int>(sig.size()));
            d.signal_labels.push_back(std::move(sig));
        } else {
            throw ParseError(where, "expected an alphabet size or {\"label\", \"signals\"}");
        }
    }

    const auto& joint = require(doc, "joint");
    if (!joint.is_object()) throw ParseError("/joint", "expected an object keyed by state label");
    for (const auto& [key, value] : joint.items())
        if (std::find(d.states.begin(), d.states.end(), key) == d.states.end())
            throw ParseError(pointer("/joint", key), "unknown state \"" + key + "\"");
    for (const auto& s : d.states) {
        const auto where = pointer("/joint", s);
        if (!joint.contains(s)) throw ParseError(where, "missing joint distribution for state \"" + s + "\"");
        std::vector<Rational> flat;
        flatten(joint[s], d.alphabet_sizes, 0, decimals, where, flat);
        d.joint.push_back(std::move(flat));
    }
    for (const auto& [key, value] : doc.items()) {
        static const std::set<std::string> known{"schema_version", "states",    "prior",      "agents",
                                                 "joint",          "tolerance_mode", "tolerance", "horizon_cap"};
        if (!known.count(key)) throw ParseError(pointer("", key), "unknown key");
    }
    try {
        return InfoStructure(std::move(d));
    } catch (const std::invalid_argument& e) {
        throw ParseError("", e.what());
    }
}

InfoStructure load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path.string(), "cannot open scenario file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

void require_valid(const InfoStructure& info) {
    const auto report = validate(info);
    if (report.passed()) return;
    const auto& v = report.violations.front();
    throw ParseError(check_pointer(info, v), v.check + ": " + v.message);
}

std::string serialize_scenario(const InfoStructure& info, int indent) { return build_json(info).dump(indent); }

std::string scenario_digest(const InfoStructure& info) {
    const auto text = build_json(info).dump();
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(text.data(), text.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
        throw InvariantViolation("SHA-256 digest failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xF];
    }
    return out;
}

std::filesystem::path bundled_scenario(std::string_view name) {
    return std::filesystem::path(COMMONLEARN_SCENARIO_DIR) / (std::string(name) + ".json");
}

}  // namespace commonlearn
