#pragma once

// Independent reference computations for the test suites. Everything here
// works from the raw joint tensors and avoids the library's engines.

#include "commonlearn/info_structure.hpp"

#include <functional>
#include <map>
#include <set>
#include <vector>

namespace oracle {

using commonlearn::InfoStructure;
using commonlearn::Rational;

/// Per-agent signal counts of one history, agent-major.
using Counts = std::vector<std::vector<int>>;

/// Signals of each agent in a flattened joint profile (agent 0 most
/// significant).
std::vector<int> decode_profile(std::size_t flat, const std::vector<int>& alphabet_sizes);

/// Law of the count profile after t periods in one state, found by walking
/// every joint signal sequence of length t.
std::map<Counts, Rational> sequence_law(const InfoStructure& info, std::size_t state, int t);

/// Same laws for every state, computed once.
class Enumeration {
public:
    Enumeration(const InfoStructure& info, int t);

    int horizon() const noexcept { return t_; }
    const std::map<Counts, Rational>& law(std::size_t state) const { return laws_[state]; }

    /// Posterior over states given `agent`'s own counts.
    std::vector<Rational> posterior(std::size_t agent, const std::vector<int>& own) const;

    /// P(event | agent's own counts) with event given by membership of
    /// (state, profile). Zero when the own counts have probability zero.
    Rational belief(std::size_t agent, const std::vector<int>& own,
                    const std::function<bool(std::size_t, const Counts&)>& event) const;

    /// Every own count vector of `agent` with positive probability.
    std::vector<std::vector<int>> own_counts(std::size_t agent) const;

    std::size_t num_states() const noexcept { return laws_.size(); }

private:
    const InfoStructure* info_;
    int t_;
    std::vector<std::map<Counts, Rational>> laws_;
};

/// Set of (state, profile) points in the support of some state.
using PointSet = std::set<std::pair<std::size_t, Counts>>;

/// `above` drops points whose belief equals q exactly. A floating-point
/// engine may land on either side of such ties, so its image should sit
/// between the two.
enum class Threshold { at_least, above };

/// Points at which `agent` believes `event` with probability at least q.
PointSet belief_image(const Enumeration& e, const Rational& q, std::size_t agent, const PointSet& event,
                      Threshold rule = Threshold::at_least);
PointSet mutual_belief_image(const Enumeration& e, const Rational& q, const PointSet& event,
                             Threshold rule = Threshold::at_least);
/// Intersection of the iterates X1 = B(F), X(n+1) = B(Xn).
PointSet common_belief(const Enumeration& e, const Rational& q, const PointSet& event,
                       Threshold rule = Threshold::at_least);

/// lower is a subset of `got` and `got` of upper.
bool sandwiched(const PointSet& lower, const PointSet& got, const PointSet& upper);
/// Every support point whose state is in `states`.
PointSet state_points(const Enumeration& e, const std::vector<std::size_t>& states);

/// Exact binomial probability that a/t lies within `radius` of p, where a is
/// the count of the first signal.
Rational binomial_ball(const Rational& p, int t, const Rational& radius);

/// P(both agents' empirical measures within `radius` of some cell state's
/// marginals) for two binary agents, summing the multinomial over all four
/// cell counts in long double. O(t^3).
long double pair_ball(const InfoStructure& info, std::size_t state, int t, const Rational& radius,
                      const std::vector<std::size_t>& cell);

/// Conditional law of `to`'s signal given `from`'s signal built from the
/// pairwise table, and the largest row TV distance.
std::vector<std::vector<Rational>> prediction_rows(const InfoStructure& info, std::size_t state, std::size_t from,
                                                   std::size_t to);
Rational row_tv(const std::vector<std::vector<Rational>>& rows);

/// Supremum exponent from the closed-form root of L y^2 + (1 - L) y - q = 0,
/// y = q^beta.
double beta_closed_form(double q, std::size_t agents);

/// KL gap for binary alphabets: the objective is linear so the minimum over
/// the ball sits at one of the interval's two endpoints.
double binary_gap_vertices(const InfoStructure& info, double radius);

/// Same quantity for any alphabet by scanning a simplex grid of step 1/n;
/// an upper bound that tightens as n grows.
double gap_grid(const InfoStructure& info, double radius, int n);

}  // namespace oracle
