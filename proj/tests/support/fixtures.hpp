#pragma once

#include "commonlearn/info_structure.hpp"

#include <string>
#include <vector>

namespace fixtures {

using commonlearn::InfoStructure;
using commonlearn::InfoStructureData;
using commonlearn::Rational;

inline std::vector<Rational> rationals(const std::vector<std::string>& text) {
    std::vector<Rational> out;
    for (const auto& s : text) out.push_back(commonlearn::parse_rational(s));
    return out;
}

inline InfoStructureData data(std::vector<std::string> states, const std::vector<std::string>& prior,
                              std::vector<int> sizes, const std::vector<std::vector<std::string>>& joint) {
    InfoStructureData d;
    d.states = std::move(states);
    d.prior = rationals(prior);
    d.alphabet_sizes = std::move(sizes);
    for (const auto& j : joint) d.joint.push_back(rationals(j));
    return d;
}

/// Agent 1 ternary, agent 2 binary; the states differ for both agents.
inline InfoStructure ternary_pair() {
    return InfoStructure(data({"a", "b"}, {"1/3", "2/3"}, {3, 2},
                              {{"1/6", "1/6", "1/6", "1/6", "1/6", "1/6"},
                               {"1/4", "1/12", "1/12", "1/12", "1/4", "1/4"}}));
}

/// Three binary agents, two states.
inline InfoStructure three_agents() {
    return InfoStructure(data({"a", "b"}, {"1/2", "1/2"}, {2, 2, 2},
                              {{"1/8", "1/8", "1/8", "1/8", "1/8", "1/8", "1/8", "1/8"},
                               {"1/4", "1/8", "1/8", "1/16", "1/16", "1/8", "1/8", "1/8"}}));
}

/// Two binary agents with a zero cell in the second state.
inline InfoStructure sparse_pair() {
    return InfoStructure(data({"a", "b"}, {"1/2", "1/2"}, {2, 2},
                              {{"1/4", "1/4", "1/4", "1/4"}, {"1/2", "1/4", "0", "1/4"}}));
}

}  // namespace fixtures
