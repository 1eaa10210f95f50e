#pragma once

#include "commonlearn/rational.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace commonlearn {

/// Raw ingredients of an information structure: states with a prior, the
/// agents' signal alphabets and one joint signal distribution per state.
///
/// `joint[s]` is the flattened tensor over X_1 x ... x X_L in row-major order
/// (agent 0 is the most significant coordinate).
struct InfoStructureData {
    std::vector<std::string> states;
    std::vector<Rational> prior;
    std::vector<int> alphabet_sizes;
    std::vector<std::vector<Rational>> joint;
    std::vector<std::string> agent_labels;               // defaults to "1".."L"
    std::vector<std::vector<std::string>> signal_labels;  // defaults to "0".."k-1"
    std::optional<double> tolerance;                     // set => tolerance-based identification
    std::optional<int> horizon_cap;
};

/// An immutable finite information structure with exact probabilities and
/// cached real-valued views. Agents and signals are 0-based in this API.
///
/// Construction only checks shapes (std::invalid_argument on mismatch);
/// probabilistic requirements are reported by validate().
class InfoStructure {
public:
    explicit InfoStructure(InfoStructureData data);

    std::size_t num_states() const noexcept { return data_.states.size(); }
    std::size_t num_agents() const noexcept { return data_.alphabet_sizes.size(); }
    int alphabet_size(std::size_t agent) const;
    const std::vector<int>& alphabet_sizes() const noexcept { return data_.alphabet_sizes; }
    /// Number of joint signal profiles |X|.
    std::size_t num_signal_profiles() const noexcept { return num_profiles_; }

    const std::string& state_label(std::size_t state) const;
    std::optional<std::size_t> find_state(std::string_view label) const;
    const std::string& agent_label(std::size_t agent) const;
    const std::string& signal_label(std::size_t agent, int signal) const;

    const Rational& prior(std::size_t state) const;
    double prior_value(std::size_t state) const;
    double log_prior(std::size_t state) const;

    std::span<const Rational> joint(std::size_t state) const;
    std::span<const double> joint_values(std::size_t state) const;

    /// phi^theta_ell, exact.
    const std::vector<Rational>& marginal(std::size_t state, std::size_t agent) const;
    const std::vector<double>& marginal_values(std::size_t state, std::size_t agent) const;
    const std::vector<double>& log_marginal(std::size_t state, std::size_t agent) const;

    /// Signal of `agent` in the flattened joint profile `flat`.
    int signal_of(std::size_t flat, std::size_t agent) const;
    std::size_t stride(std::size_t agent) const;

    std::optional<double> tolerance() const noexcept { return data_.tolerance; }
    std::optional<int> horizon_cap() const noexcept { return data_.horizon_cap; }

    const InfoStructureData& data() const noexcept { return data_; }

private:
    void check_state(std::size_t state) const;
    void check_agent(std::size_t agent) const;

    InfoStructureData data_;
    std::size_t num_profiles_ = 0;
    std::vector<std::size_t> strides_;
    std::vector<double> prior_values_;
    std::vector<double> log_prior_;
    std::vector<std::vector<double>> joint_values_;
    // [state][agent]
    std::vector<std::vector<std::vector<Rational>>> marginals_;
    std::vector<std::vector<std::vector<double>>> marginal_values_;
    std::vector<std::vector<std::vector<double>>> log_marginals_;
};

/// Joint law of two agents' signals in one state: rows index agent `first`.
std::vector<std::vector<Rational>> pairwise_marginal(const InfoStructure& info, std::size_t state,
                                                     std::size_t first, std::size_t second);

// ---------------------------------------------------------------------------

/// A partition of {0, ..., n-1} in canonical form: members sorted within each
/// cell, cells ordered by their least member.
class Partition {
public:
    Partition() = default;
    /// Throws std::invalid_argument unless `cells` are nonempty, disjoint and
    /// cover 0..n-1 for some n.
    explicit Partition(std::vector<std::vector<std::size_t>> cells);

    /// Builds the partition whose cells are the states sharing a block id.
    static Partition from_blocks(std::span<const std::size_t> block_of_state);
    static Partition discrete(std::size_t n);
    static Partition trivial(std::size_t n);

    std::size_t num_states() const noexcept { return cell_of_.size(); }
    std::size_t size() const noexcept { return cells_.size(); }
    const std::vector<std::vector<std::size_t>>& cells() const noexcept { return cells_; }
    std::size_t cell_index(std::size_t state) const { return cell_of_.at(state); }
    const std::vector<std::size_t>& cell_containing(std::size_t state) const {
        return cells_[cell_index(state)];
    }

    /// True if every cell of *this lies inside a cell of `coarser`.
    bool refines(const Partition& coarser) const;
    /// True if `states` (any order) is exactly one of the cells.
    bool has_cell(std::span<const std::size_t> states) const;

    friend bool operator==(const Partition& a, const Partition& b) { return a.cells_ == b.cells_; }

private:
    std::vector<std::vector<std::size_t>> cells_;
    std::vector<std::size_t> cell_of_;
};

/// Finest partition whose cells are unions of cells of both a and b.
/// Throws std::invalid_argument if the state counts differ.
Partition partition_join(const Partition& a, const Partition& b);

/// Q_ell: states grouped by equal marginal for `agent`. Exact equality unless
/// the structure carries a tolerance, in which case states within TV distance
/// tau are linked and cells are the connected components.
Partition identification_partition(const InfoStructure& info, std::size_t agent);

/// QI: join of all agents' identification partitions.
Partition common_identification(const InfoStructure& info);

// ---------------------------------------------------------------------------

struct Violation {
    std::string check;
    std::optional<std::size_t> state;
    std::optional<std::pair<std::size_t, std::size_t>> agents;
    std::vector<int> coordinates;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool passed() const noexcept { return violations.empty(); }
};

/// Checks the type invariants, full-support prior, normalization and pairwise
/// full support. Violations are reported, never thrown.
ValidationReport validate(const InfoStructure& info);

/// The four-state, two-agent binary structure with a uniform prior used
/// throughout the tests and the `reproduce-example1` command.
InfoStructure example1();

}  // namespace commonlearn
