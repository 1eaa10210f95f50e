#include "commonlearn/info_structure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace commonlearn {

InfoStructure::InfoStructure(InfoStructureData data) : data_(std::move(data)) {
    const std::size_t n_states = data_.states.size();
    const std::size_t n_agents = data_.alphabet_sizes.size();
    if (data_.prior.size() != n_states)
        throw std::invalid_argument("prior has " + std::to_string(data_.prior.size()) + " entries for " +
                                    std::to_string(n_states) + " states");
    if (data_.joint.size() != n_states)
        throw std::invalid_argument("expected one joint distribution per state");
    if (n_agents == 0) throw std::invalid_argument("an information structure needs at least one agent");

    num_profiles_ = 1;
    strides_.assign(n_agents, 1);
    for (std::size_t l = n_agents; l-- > 0;) {
        if (data_.alphabet_sizes[l] < 1)
            throw std::invalid_argument("agent " + std::to_string(l + 1) + " has an empty signal alphabet");
        strides_[l] = num_profiles_;
        num_profiles_ *= static_cast<std::size_t>(data_.alphabet_sizes[l]);
    }
    for (std::size_t s = 0; s < n_states; ++s)
        if (data_.joint[s].size() != num_profiles_)
            throw std::invalid_argument("joint distribution of state '" + data_.states[s] + "' has " +
                                        std::to_string(data_.joint[s].size()) + " entries, expected " +
                                        std::to_string(num_profiles_));

    if (data_.agent_labels.empty())
        for (std::size_t l = 0; l < n_agents; ++l) data_.agent_labels.push_back(std::to_string(l + 1));
    if (data_.agent_labels.size() != n_agents) throw std::invalid_argument("agent label count mismatch");
    if (data_.signal_labels.empty()) {
        data_.signal_labels.resize(n_agents);
        for (std::size_t l = 0; l < n_agents; ++l)
            for (int x = 0; x < data_.alphabet_sizes[l]; ++x) data_.signal_labels[l].push_back(std::to_string(x));
    }
    if (data_.signal_labels.size() != n_agents) throw std::invalid_argument("signal label list count mismatch");
    for (std::size_t l = 0; l < n_agents; ++l)
        if (data_.signal_labels[l].size() != static_cast<std::size_t>(data_.alphabet_sizes[l]))
            throw std::invalid_argument("signal label count mismatch for agent " + data_.agent_labels[l]);

    for (auto& p : data_.prior) p.canonicalize();
    for (auto& tensor : data_.joint)
        for (auto& v : tensor) v.canonicalize();

    prior_values_ = to_doubles(data_.prior);
    log_prior_.resize(n_states);
    for (std::size_t s = 0; s < n_states; ++s)
        log_prior_[s] = prior_values_[s] > 0 ? std::log(prior_values_[s]) : -std::numeric_limits<double>::infinity();

    joint_values_.resize(n_states);
    marginals_.resize(n_states);
    marginal_values_.resize(n_states);
    log_marginals_.resize(n_states);
    for (std::size_t s = 0; s < n_states; ++s) {
        joint_values_[s] = to_doubles(data_.joint[s]);
        marginals_[s].resize(n_agents);
        marginal_values_[s].resize(n_agents);
        log_marginals_[s].resize(n_agents);
        for (std::size_t l = 0; l < n_agents; ++l) {
            auto& m = marginals_[s][l];
            m.assign(static_cast<std::size_t>(data_.alphabet_sizes[l]), Rational(0));
            for (std::size_t flat = 0; flat < num_profiles_; ++flat)
                m[static_cast<std::size_t>(signal_of(flat, l))] += data_.joint[s][flat];
            marginal_values_[s][l] = to_doubles(m);
            auto& lm = log_marginals_[s][l];
            lm.resize(m.size());
            for (std::size_t x = 0; x < m.size(); ++x)
                lm[x] = m[x] > 0 ? std::log(marginal_values_[s][l][x]) : -std::numeric_limits<double>::infinity();
        }
    }
}

void InfoStructure::check_state(std::size_t state) const {
    if (state >= num_states()) throw std::out_of_range("unknown state index " + std::to_string(state));
}

void InfoStructure::check_agent(std::size_t agent) const {
    if (agent >= num_agents()) throw std::out_of_range("unknown agent index " + std::to_string(agent));
}

int InfoStructure::alphabet_size(std::size_t agent) const {
    check_agent(agent);
    return data_.alphabet_sizes[agent];
}

const std::string& InfoStructure::state_label(std::size_t state) const {
    check_state(state);
    return data_.states[state];
}

std::optional<std::size_t> InfoStructure::find_state(std::string_view label) const {
    for (std::size_t s = 0; s < data_.states.size(); ++s)
        if (data_.states[s] == label) return s;
    return std::nullopt;
}

const std::string& InfoStructure::agent_label(std::size_t agent) const {
    check_agent(agent);
    return data_.agent_labels[agent];
}

const std::string& InfoStructure::signal_label(std::size_t agent, int signal) const {
    check_agent(agent);
    return data_.signal_labels[agent].at(static_cast<std::size_t>(signal));
}

const Rational& InfoStructure::prior(std::size_t state) const {
    check_state(state);
    return data_.prior[state];
}

double InfoStructure::prior_value(std::size_t state) const {
    check_state(state);
    return prior_values_[state];
}

double InfoStructure::log_prior(std::size_t state) const {
    check_state(state);
    return log_prior_[state];
}

std::span<const Rational> InfoStructure::joint(std::size_t state) const {
    check_state(state);
    return data_.joint[state];
}

std::span<const double> InfoStructure::joint_values(std::size_t state) const {
    check_state(state);
    return joint_values_[state];
}

const std::vector<Rational>& InfoStructure::marginal(std::size_t state, std::size_t agent) const {
    check_state(state);
    check_agent(agent);
    return marginals_[state][agent];
}

const std::vector<double>& InfoStructure::marginal_values(std::size_t state, std::size_t agent) const {
    check_state(state);
    check_agent(agent);
    return marginal_values_[state][agent];
}

const std::vector<double>& InfoStructure::log_marginal(std::size_t state, std::size_t agent) const {
    check_state(state);
    check_agent(agent);
    return log_marginals_[state][agent];
}

int InfoStructure::signal_of(std::size_t flat, std::size_t agent) const {
    return static_cast<int>((flat / strides_[agent]) % static_cast<std::size_t>(data_.alphabet_sizes[agent]));
}

std::size_t InfoStructure::stride(std::size_t agent) const {
    check_agent(agent);
    return strides_[agent];
}

std::vector<std::vector<Rational>> pairwise_marginal(const InfoStructure& info, std::size_t state,
                                                     std::size_t first, std::size_t second) {
    if (first == second) throw std::invalid_argument("pairwise marginal needs two distinct agents");
    const auto tensor = info.joint(state);
    const auto rows = static_cast<std::size_t>(info.alphabet_size(first));
    const auto cols = static_cast<std::size_t>(info.alphabet_size(second));
    std::vector<std::vector<Rational>> out(rows, std::vector<Rational>(cols, Rational(0)));
    for (std::size_t flat = 0; flat < tensor.size(); ++flat)
        out[static_cast<std::size_t>(info.signal_of(flat, first))][static_cast<std::size_t>(info.signal_of(flat, second))] +=
            tensor[flat];
    return out;
}

// ---------------------------------------------------------------------------
// Partition

Partition::Partition(std::vector<std::vector<std::size_t>> cells) {
    std::size_t n = 0;
    for (const auto& c : cells) {
        if (c.empty()) throw std::invalid_argument("partition cell is empty");
        n += c.size();
    }
    cell_of_.assign(n, n);
    for (auto& c : cells) std::sort(c.begin(), c.end());
    std::sort(cells.begin(), cells.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
    for (std::size_t i = 0; i < cells.size(); ++i)
        for (std::size_t s : cells[i]) {
            if (s >= n) throw std::invalid_argument("partition cells do not cover 0..n-1");
            if (cell_of_[s] != n) throw std::invalid_argument("partition cells overlap at state " + std::to_string(s));
            cell_of_[s] = i;
        }
    cells_ = std::move(cells);
}

Partition Partition::from_blocks(std::span<const std::size_t> block_of_state) {
    std::vector<std::vector<std::size_t>> cells;
    std::vector<std::size_t> ids;
    for (std::size_t s = 0; s < block_of_state.size(); ++s) {
        auto it = std::find(ids.begin(), ids.end(), block_of_state[s]);
        if (it == ids.end()) {
            ids.push_back(block_of_state[s]);
            cells.push_back({s});
        } else {
            cells[static_cast<std::size_t>(it - ids.begin())].push_back(s);
        }
    }
    return Partition(std::move(cells));
}

Partition Partition::discrete(std::size_t n) {
    std::vector<std::vector<std::size_t>> cells;
    for (std::size_t s = 0; s < n; ++s) cells.push_back({s});
    return Partition(std::move(cells));
}

Partition Partition::trivial(std::size_t n) {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    return n == 0 ? Partition() : Partition({all});
}

bool Partition::refines(const Partition& coarser) const {
    if (coarser.num_states() != num_states()) return false;
    for (const auto& c : cells_) {
        const std::size_t target = coarser.cell_index(c.front());
        for (std::size_t s : c)
            if (coarser.cell_index(s) != target) return false;
    }
    return true;
}

bool Partition::has_cell(std::span<const std::size_t> states) const {
    std::vector<std::size_t> sorted(states.begin(), states.end());
    std::sort(sorted.begin(), sorted.end());
    return std::find(cells_.begin(), cells_.end(), sorted) != cells_.end();
}

namespace {

struct DisjointSets {
    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    std::vector<std::size_t> blocks() {
        std::vector<std::size_t> out(parent.size());
        for (std::size_t s = 0; s < parent.size(); ++s) out[s] = find(s);
        return out;
    }
    std::vector<std::size_t> parent;
};

}  // namespace

Partition partition_join(const Partition& a, const Partition& b) {
    if (a.num_states() != b.num_states())
        throw std::invalid_argument("cannot join partitions of different state sets");
    DisjointSets sets(a.num_states());
    for (const auto* p : {&a, &b})
        for (const auto& cell : p->cells())
            for (std::size_t s : cell) sets.unite(cell.front(), s);
    const auto blocks = sets.blocks();
    return Partition::from_blocks(blocks);
}

Partition identification_partition(const InfoStructure& info, std::size_t agent) {
    const std::size_t n = info.num_states();
    DisjointSets sets(n);
    const auto tol = info.tolerance();
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t r = 0; r < s; ++r) {
            bool same;
            if (tol) {
                const auto& a = info.marginal(s, agent);
                const auto& b = info.marginal(r, agent);
                Rational tv(0);
                for (std::size_t x = 0; x < a.size(); ++x) tv += abs(a[x] - b[x]);
                same = to_double(tv / 2) <= *tol;
            } else {
                same = info.marginal(s, agent) == info.marginal(r, agent);
            }
            if (same) sets.unite(r, s);
        }
    const auto blocks = sets.blocks();
    return Partition::from_blocks(blocks);
}

Partition common_identification(const InfoStructure& info) {
    Partition joined = identification_partition(info, 0);
    for (std::size_t l = 1; l < info.num_agents(); ++l) joined = partition_join(joined, identification_partition(info, l));
    return joined;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

bool sums_to_one(const Rational& sum, std::optional<double> tol) {
    if (tol) return std::abs(to_double(sum) - 1.0) <= *tol;
    return sum == 1;
}

}  // namespace

ValidationReport validate(const InfoStructure& info) {
    ValidationReport report;
    auto add = [&](Violation v) { report.violations.push_back(std::move(v)); };
    const auto tol = info.tolerance();

    if (info.num_states() < 1) add({"state_count", {}, {}, {}, "at least one state is required"});
    if (info.num_agents() < 2)
        add({"agent_count", {}, {}, {}, "at least two agents are required, found " + std::to_string(info.num_agents())});

    Rational prior_sum(0);
    for (std::size_t s = 0; s < info.num_states(); ++s) {
        prior_sum += info.prior(s);
        if (info.prior(s) <= 0)
            add({"prior_full_support", s, {}, {},
                 "prior not full support: p(" + info.state_label(s) + ") = " + to_string(info.prior(s))});
    }
    if (info.num_states() > 0 && !sums_to_one(prior_sum, tol))
        add({"prior_normalized", {}, {}, {}, "prior sums to " + to_string(prior_sum) + ", not 1"});

    for (std::size_t s = 0; s < info.num_states(); ++s) {
        const auto tensor = info.joint(s);
        Rational sum(0);
        bool negative = false;
        for (const auto& v : tensor) {
            sum += v;
            negative = negative || v < 0;
        }
        if (negative)
            add({"joint_nonnegative", s, {}, {}, "joint distribution of '" + info.state_label(s) + "' has a negative entry"});
        if (!sums_to_one(sum, tol))
            add({"joint_normalized", s, {}, {},
                 "joint distribution of '" + info.state_label(s) + "' sums to " + to_string(sum) + ", not 1"});

        for (std::size_t a = 0; a < info.num_agents(); ++a)
            for (std::size_t b = a + 1; b < info.num_agents(); ++b) {
                const auto pair = pairwise_marginal(info, s, a, b);
                for (std::size_t x = 0; x < pair.size(); ++x)
                    for (std::size_t y = 0; y < pair[x].size(); ++y)
                        if (pair[x][y] <= 0)
                            add({"pairwise_full_support", s, std::pair{a, b},
                                 {static_cast<int>(x), static_cast<int>(y)},
                                 "state '" + info.state_label(s) + "': agents " + info.agent_label(a) + " and " +
                                     info.agent_label(b) + " never see signals (" + info.signal_label(a, static_cast<int>(x)) +
                                     ", " + info.signal_label(b, static_cast<int>(y)) + ") together"});
            }
    }
    return report;
}

InfoStructure example1() {
    auto r = [](long n, long d) {
        Rational q{mpz_class(n), mpz_class(d)};
        q.canonicalize();
        return q;
    };
    InfoStructureData d;
    d.states = {"theta1", "theta2", "theta3", "theta4"};
    d.prior = {r(1, 4), r(1, 4), r(1, 4), r(1, 4)};
    d.alphabet_sizes = {2, 2};
    // rows x1, columns x2
    d.joint = {
        {r(3, 8), r(1, 8), r(1, 8), r(3, 8)},
        {r(5, 12), r(1, 12), r(1, 4), r(1, 4)},
        {r(5, 12), r(1, 4), r(1, 12), r(1, 4)},
        {r(2, 5), r(1, 5), r(1, 5), r(1, 5)},
    };
    return InfoStructure(std::move(d));
}

}  // namespace commonlearn
