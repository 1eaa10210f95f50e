#pragma once

#include "commonlearn/belief_engine.hpp"
#include "commonlearn/info_structure.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace commonlearn {

/// Worst-case log-likelihood margin of a state's identification cell over an
/// empirical ball: value = -max over rivals outside the cell and over
/// distributions phi within TV radius of the state's marginal of
/// sum_x phi(x) log(rival(x) / own(x)).
struct KlGap {
    double value = 0.0;  // +infinity when the agent has no rival states
    std::size_t agent = 0;
    std::size_t state = 0;
    std::optional<std::size_t> rival;  // binding rival, if any
    std::vector<double> argmax;        // maximizing phi for the binding rival

    bool positive() const noexcept { return value > 0.0; }
};

/// The objective is linear in phi, so the maximum over the TV ball is found
/// by moving up to `radius` mass onto the best coordinate from the worst
/// ones.
KlGap kl_gap(const InfoStructure& info, std::size_t agent, std::size_t state, double radius);

/// Minimum of kl_gap over all agents and states.
KlGap global_kl_gap(const InfoStructure& info, double radius);

struct RadiusEstimate {
    double value = 0.0;       // largest radius found with a positive gap
    bool degenerate = false;  // no agent separates any pair of states
};

/// Bisection for the supremum of radii with a positive global gap.
RadiusEstimate max_epsilon(const InfoStructure& info, double resolution = 1e-6);

/// Least KL divergence from the state's marginal over distributions outside
/// the closed TV ball; +infinity when that set is empty.
double sanov_exponent(const InfoStructure& info, std::size_t agent, std::size_t state, double radius);

struct SanovBounds {
    double exponent = 0.0;
    double lower = 0.0;  // lower bound on P(empirical measure inside the ball)
    double upper = 1.0;
    // Logs of the matching bounds on the outside probability.
    double log_outside_lower = 0.0;
    double log_outside_upper = 0.0;
};

/// Method-of-types bounds on the ball probability at horizon t >= 1.
SanovBounds sanov_bounds(const InfoStructure& info, std::size_t agent, std::size_t state, double radius, int t);

/// 1 - exp(-t b) / prior(state), clamped to [0, 1], with b the global gap at
/// `radius`. Throws std::domain_error when b <= 0.
double posterior_floor(const InfoStructure& info, std::size_t state, double radius, int t);
/// log(exp(-t b) / prior(state)): the log of the complement the floor allows.
double log_floor_complement(const InfoStructure& info, std::size_t state, double radius, int t);

/// Supremum of exponents beta with q^beta (1 - agents (1 - q^beta)) > q,
/// by bisection to 1e-10. Requires 0 < q < 1 and agents >= 1.
double beta_for(double q, std::size_t agents);

struct ThresholdCertificate {
    std::vector<std::size_t> cell;
    std::size_t state = 0;
    double probability = 0.0;  // P^state(identified ball of cell) at the threshold
};

struct TimeThreshold {
    int threshold = 0;   // max(search_time, log_time)
    int search_time = 0; // first horizon of a run of `window` passing horizons
    int log_time = 0;
    double q_beta = 0.0;
    double gap = 0.0;
    std::vector<ThresholdCertificate> certificates;
};

struct ThresholdOptions {
    int window = 10;
    int max_horizon = 10000;
    EngineLimits limits{};  // used only for shapes without a closed-form ball law
};

/// Horizon after which every cell's ball has probability above q^beta under
/// each of its states for `window` consecutive horizons, combined with the
/// posterior-floor horizon. Throws std::domain_error when the gap at
/// `radius` is not positive, std::invalid_argument when beta is not below
/// beta_for(q, agents), and CapacityError when no run is found by
/// max_horizon.
TimeThreshold time_threshold(const InfoStructure& info, double q, double beta, double radius,
                             const ThresholdOptions& options = {});

struct AgentStateExponent {
    std::size_t agent = 0;
    std::size_t state = 0;
    double exponent = 0.0;
};

struct BoundSet {
    double radius = 0.0;
    double q = 0.0;
    KlGap gap;
    RadiusEstimate max_radius;
    std::vector<AgentStateExponent> exponents;
    double beta_star = 0.0;
    double beta = 0.0;
    std::optional<TimeThreshold> threshold;  // only when the gap is positive
    Rational contraction;
};

/// Everything above for one (q, radius). `beta` defaults to half of
/// beta_for(q, agents).
BoundSet compute_bounds(const InfoStructure& info, double q, double radius, std::optional<double> beta = std::nullopt,
                        const ThresholdOptions& options = {});

}  // namespace commonlearn
