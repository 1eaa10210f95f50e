#pragma once

#include "commonlearn/belief_engine.hpp"
#include "commonlearn/count_space.hpp"
#include "commonlearn/info_structure.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace commonlearn {

enum class EventOrigin { custom, state_cylinder, ball, belief_image, intersection, union_of, complement };

std::string_view to_string(EventOrigin origin);

/// A set of (state, count profile) points at one horizon, stored as a dense
/// bitmap laid out state-major: bit index = state * profiles + profile.
class EpistemicEvent {
public:
    EpistemicEvent(std::size_t num_states, ProfileSpace space, EventOrigin origin = EventOrigin::custom,
                   bool filled = false);

    std::size_t num_states() const noexcept { return num_states_; }
    const ProfileSpace& space() const noexcept { return space_; }
    int horizon() const noexcept { return space_.horizon(); }
    EventOrigin origin() const noexcept { return origin_; }
    void set_origin(EventOrigin origin) noexcept { origin_ = origin; }

    bool contains(std::size_t state, std::size_t profile) const {
        return bits_[state * space_.size() + profile] != 0;
    }
    bool contains(std::size_t state, const CountProfile& profile) const;
    void set(std::size_t state, std::size_t profile, bool member = true) {
        bits_[state * space_.size() + profile] = member ? 1 : 0;
    }

    std::size_t count() const noexcept;
    bool empty() const noexcept;
    bool full() const noexcept;
    bool subset_of(const EpistemicEvent& other) const;
    std::span<const std::uint8_t> bits() const noexcept { return bits_; }

    /// Set algebra. Operands must share the state count and profile space,
    /// otherwise std::invalid_argument is thrown.
    EpistemicEvent& operator&=(const EpistemicEvent& other);
    EpistemicEvent& operator|=(const EpistemicEvent& other);
    friend EpistemicEvent operator&(EpistemicEvent a, const EpistemicEvent& b) { return a &= b; }
    friend EpistemicEvent operator|(EpistemicEvent a, const EpistemicEvent& b) { return a |= b; }
    EpistemicEvent operator~() const;

    friend bool operator==(const EpistemicEvent& a, const EpistemicEvent& b) {
        return a.num_states_ == b.num_states_ && a.space_ == b.space_ && a.bits_ == b.bits_;
    }

private:
    void check_compatible(const EpistemicEvent& other) const;

    std::size_t num_states_;
    ProfileSpace space_;
    EventOrigin origin_;
    std::vector<std::uint8_t> bits_;
};

/// Closed total-variation ball around an exact distribution, tested exactly
/// on count vectors.
class TvBall {
public:
    TvBall(const std::vector<Rational>& center, const Rational& radius);
    bool contains(std::span<const int> counts) const;

private:
    std::vector<Rational> center_;
    Rational radius_;
    // Integer form: center = numerators / denom, radius = r_num / r_den.
    bool small_ = false;
    std::vector<long long> numerators_;
    long long denom_ = 1, r_num_ = 0, r_den_ = 1;
};

/// Precomputed exact-engine tables for one structure at one horizon: the
/// per-state count laws and, per agent, the weights P(state, profile | own
/// counts) used by the belief operator. Immutable after construction.
class EpistemicModel {
public:
    /// Throws CapacityError when the horizon is outside `limits`.
    EpistemicModel(InfoStructure info, int t, const EngineLimits& limits);
    EpistemicModel(InfoStructure info, int t);

    const InfoStructure& info() const noexcept { return info_; }
    int horizon() const noexcept { return space_.horizon(); }
    const ProfileSpace& space() const noexcept { return space_; }
    std::size_t num_states() const noexcept { return info_.num_states(); }
    std::size_t num_agents() const noexcept { return info_.num_agents(); }

    const CountLaw& law(std::size_t state) const { return laws_.at(state); }
    /// P(state, profile | agent's own counts in profile), zero off the support.
    double weight(std::size_t agent, std::size_t state, std::size_t profile) const {
        return weights_[agent][state * space_.size() + profile];
    }

    EpistemicEvent empty_event() const;
    EpistemicEvent full_event() const;

private:
    InfoStructure info_;
    ProfileSpace space_;
    std::vector<CountLaw> laws_;
    std::vector<std::vector<double>> weights_;
};

/// Cylinder {state in states} x all profiles. Out-of-range states throw.
EpistemicEvent state_event(const EpistemicModel& model, std::span<const std::size_t> states);

/// Profiles whose every agent's empirical measure lies within TV radius
/// `radius` of the state's marginal; all states included. Horizon 0 has no
/// empirical measure and yields the empty event.
EpistemicEvent empirical_ball_event(const EpistemicModel& model, const Rational& radius, std::size_t state);
/// Union of empirical_ball_event over `states`.
EpistemicEvent identified_ball_event(const EpistemicModel& model, const Rational& radius,
                                     std::span<const std::size_t> states);

/// Each agent's belief in `event`, indexed by that agent's own count rank.
std::vector<double> individual_beliefs(const EpistemicModel& model, std::size_t agent, const EpistemicEvent& event);

/// Profiles at which `agent` assigns probability at least q - slack to
/// `event`; all states included.
EpistemicEvent individual_belief_operator(const EpistemicModel& model, double q, std::size_t agent,
                                          const EpistemicEvent& event, double slack = 0.0);
EpistemicEvent mutual_belief_operator(const EpistemicModel& model, double q, const EpistemicEvent& event,
                                      double slack = 0.0);

enum class CommonBeliefRule {
    iterate_then_intersect,  // X1 = B(F), X(n+1) = B(Xn), result = intersection of all Xn
    believe_intersection,    // X1 = B(F), X(n+1) = B(F and Xn)
};

struct CommonBeliefResult {
    EpistemicEvent event;
    /// Number of distinct iterates computed before the sequence repeated or
    /// the running intersection became empty.
    int iterations = 0;
};

CommonBeliefResult common_belief_event(const EpistemicModel& model, double q, const EpistemicEvent& event,
                                       CommonBeliefRule rule = CommonBeliefRule::iterate_then_intersect,
                                       double slack = 0.0);

struct EvidenceWitness {
    std::size_t state = 0;
    CountProfile profile;
    std::vector<double> beliefs;  // one per agent
};

struct EvidenceReport {
    bool is_evident = true;
    double q = 0.0;
    double slack = 0.0;
    std::size_t violations = 0;
    std::vector<EvidenceWitness> witnesses;  // at most the requested number
};

EvidenceReport is_q_evident(const EpistemicModel& model, double q, const EpistemicEvent& event,
                            std::size_t max_witnesses = 10, double slack = 0.0);

/// Probability of `event`, under the prior or conditional on a state.
double event_probability(const EpistemicModel& model, const EpistemicEvent& event,
                         std::optional<std::size_t> state = std::nullopt);

/// P^state(identified ball of `cell` at horizon t). Two binary agents use a
/// direct binomial computation valid at any horizon; other shapes build an
/// EpistemicModel within `limits`.
double ball_probability(const InfoStructure& info, std::size_t state, int t, const Rational& radius,
                        std::span<const std::size_t> cell, const EngineLimits& limits = {});

/// CSV with columns state, one column per (agent, signal) count, member.
void write_event_csv(std::ostream& out, const EpistemicModel& model, const EpistemicEvent& event,
                     bool members_only = false);

}  // namespace commonlearn
