#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace commonlearn {

/// Signal counts of one agent; stands in for the agent's history because
/// signals are exchangeable across periods.
struct CountVector {
    std::vector<int> counts;

    int horizon() const noexcept;
    /// counts / horizon. Throws std::domain_error at horizon 0.
    std::vector<double> empirical() const;

    friend bool operator==(const CountVector&, const CountVector&) = default;
    friend auto operator<=>(const CountVector&, const CountVector&) = default;
};

/// One CountVector per agent, all at the same horizon.
struct CountProfile {
    std::vector<CountVector> agents;

    /// Throws std::invalid_argument when the agents' horizons disagree.
    int horizon() const;

    friend bool operator==(const CountProfile&, const CountProfile&) = default;
};

/// All count vectors over `alphabet` signals summing to `horizon`, in
/// lexicographic order. For binary alphabets the rank equals counts[0].
class CountSpace {
public:
    CountSpace() = default;
    CountSpace(int horizon, int alphabet);

    int horizon() const noexcept { return horizon_; }
    int alphabet() const noexcept { return alphabet_; }
    std::size_t size() const noexcept { return size_; }

    CountVector at(std::size_t rank) const;
    /// Throws std::invalid_argument for vectors of the wrong shape or horizon.
    std::size_t rank(std::span<const int> counts) const;
    std::size_t rank(const CountVector& c) const { return rank(c.counts); }

    /// Number of count vectors of `alphabet` signals summing to `horizon`.
    static std::size_t count(int horizon, int alphabet);

private:
    int horizon_ = 0;
    int alphabet_ = 1;
    std::size_t size_ = 1;
};

/// Product of per-agent count spaces at a common horizon, indexed in mixed
/// radix with agent 0 most significant.
class ProfileSpace {
public:
    ProfileSpace() = default;
    ProfileSpace(int horizon, const std::vector<int>& alphabet_sizes);

    int horizon() const noexcept { return horizon_; }
    std::size_t num_agents() const noexcept { return spaces_.size(); }
    std::size_t size() const noexcept { return size_; }
    const CountSpace& agent_space(std::size_t agent) const { return spaces_.at(agent); }
    std::size_t stride(std::size_t agent) const { return strides_.at(agent); }

    /// Rank of `agent`'s count vector inside profile `index`.
    std::size_t agent_rank(std::size_t index, std::size_t agent) const {
        return (index / strides_[agent]) % spaces_[agent].size();
    }
    CountProfile at(std::size_t index) const;
    std::size_t index(const CountProfile& profile) const;
    std::size_t index_of_ranks(std::span<const std::size_t> ranks) const;

    /// Profile count for the given horizon without building the space;
    /// saturates at SIZE_MAX.
    static std::size_t count(int horizon, const std::vector<int>& alphabet_sizes);

    friend bool operator==(const ProfileSpace& a, const ProfileSpace& b) {
        return a.horizon_ == b.horizon_ && a.alphabets_ == b.alphabets_;
    }

private:
    int horizon_ = 0;
    std::vector<int> alphabets_;
    std::vector<CountSpace> spaces_;
    std::vector<std::size_t> strides_;
    std::size_t size_ = 1;
};

/// log(n!) for n = 0..max, from std::lgamma.
class LogFactorials {
public:
    explicit LogFactorials(int max);
    double operator()(int n) const { return table_[static_cast<std::size_t>(n)]; }
    int max() const noexcept { return static_cast<int>(table_.size()) - 1; }

private:
    std::vector<double> table_;
};

}  // namespace commonlearn
