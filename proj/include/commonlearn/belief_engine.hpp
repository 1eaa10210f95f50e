#pragma once

#include "commonlearn/count_space.hpp"
#include "commonlearn/info_structure.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace commonlearn {

/// Half the l1 distance. Throws std::invalid_argument on a length mismatch.
double tv_distance(std::span<const double> a, std::span<const double> b);
Rational tv_distance(const std::vector<Rational>& a, const std::vector<Rational>& b);

/// Sum of a log(a/b) in nats with 0 log 0 = 0; +infinity when a is not
/// absolutely continuous with respect to b.
double kl_divergence(std::span<const double> a, std::span<const double> b);

/// Binary-alphabet shorthand: KL((x, 1-x) || (y, 1-y)).
double binary_kl(double x, double y);

/// Sum over signals of counts * log marginal; the multinomial coefficient is
/// left out because it cancels across states. -infinity when a positive
/// count hits a zero-probability signal.
double log_likelihood(const InfoStructure& info, std::size_t agent, std::size_t state, const CountVector& c);

/// Bayes posterior over states after observing `c`, normalized in log space.
/// Throws InfeasibleCounts when no state can generate `c`.
std::vector<double> posterior(const InfoStructure& info, std::size_t agent, const CountVector& c);
std::vector<double> log_posterior(const InfoStructure& info, std::size_t agent, const CountVector& c);
std::vector<Rational> posterior_exact(const InfoStructure& info, std::size_t agent, const CountVector& c);

/// Posterior mass of `states`. Throws std::out_of_range for unknown states.
double posterior_set(const InfoStructure& info, std::size_t agent, const CountVector& c,
                     std::span<const std::size_t> states);

/// Size limits for the exact engine. The defaults allow two binary agents up
/// to horizon 600; other shapes must fit the same profile budget.
struct EngineLimits {
    int horizon_cap = 600;
    double profile_budget = 601.0 * 601.0;
    /// Log-sum-exp steps allowed for the generic count-law recursion.
    double work_budget = 2e8;

    static EngineLimits with_horizon_cap(int cap);
    /// Defaults, replaced by the structure's own horizon cap when it has one.
    static EngineLimits for_structure(const InfoStructure& info);
};

/// Throws CapacityError naming the violated bound when horizon `t` is beyond
/// what the exact engine may build for `info`.
void check_capacity(const InfoStructure& info, int t, const EngineLimits& limits);

/// Log-probabilities of one agent's counts, indexed by CountSpace rank.
struct OwnCountLaw {
    std::size_t state = 0;
    std::size_t agent = 0;
    CountSpace space;
    std::vector<double> log_prob;

    int horizon() const noexcept { return space.horizon(); }
    double probability(const CountVector& c) const;
};

/// Law of the full count profile at horizon t given a state. Entries are
/// log-probabilities indexed by ProfileSpace index; -infinity marks profiles
/// outside the support.
struct CountLaw {
    std::size_t state = 0;
    ProfileSpace space;
    std::vector<double> log_prob;

    int horizon() const noexcept { return space.horizon(); }
    bool in_support(std::size_t index) const;
    double probability(std::size_t index) const;
    double probability(const CountProfile& profile) const;
    /// Sum of probabilities, for normalization checks.
    double total() const;
};

enum class JointLawMethod {
    automatic,  // closed-form inner sum for two binary agents, recursion otherwise
    recursion,  // add one joint draw at a time; any shape
};

OwnCountLaw own_count_law(const InfoStructure& info, std::size_t state, std::size_t agent, int t,
                          const EngineLimits& limits = {});

CountLaw joint_count_law(const InfoStructure& info, std::size_t state, int t, const EngineLimits& limits = {},
                         JointLawMethod method = JointLawMethod::automatic);

/// Law of `other`'s counts given `agent`'s counts `c` in `state`: for each
/// own signal x, c(x) draws from the prediction row of x, convolved.
/// Throws InfeasibleCounts when `c` has probability zero in `state`.
OwnCountLaw conditional_counterparty_law(const InfoStructure& info, std::size_t state, std::size_t agent,
                                         const CountVector& c, std::size_t other, const EngineLimits& limits = {});

/// log(exp(a) + exp(b)) without overflow.
double log_add(double a, double b) noexcept;

}  // namespace commonlearn
