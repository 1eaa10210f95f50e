#pragma once

#include "commonlearn/belief_engine.hpp"
#include "commonlearn/count_space.hpp"
#include "commonlearn/epistemic.hpp"
#include "commonlearn/info_structure.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace commonlearn {

/// SplitMix64 stream keyed by (seed, path index), so every path draws the
/// same numbers whichever worker runs it.
class PathRng {
public:
    PathRng(std::uint64_t seed, std::uint64_t path) noexcept;
    std::uint64_t next() noexcept;
    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

struct SimulationPlan {
    std::size_t state = 0;
    int horizon = 0;
    std::size_t paths = 1;
    std::uint64_t seed = 0;
};

struct Estimate {
    double mean = 0.0;
    double standard_error = 0.0;
    std::size_t n = 0;
    double half_width = 0.0;  // 3 standard errors

    static Estimate from_hits(std::size_t hits, std::size_t n);
};

/// Workers used for path simulation: hardware concurrency, capped by the
/// COMMON_LEARNING_THREADS environment variable when set.
std::size_t worker_count();

/// Draws joint signal profiles by inverse CDF on the flattened joint law of
/// one state and accumulates per-agent counts.
class PathSampler {
public:
    PathSampler(const InfoStructure& info, std::size_t state);
    CountProfile sample(int horizon, PathRng& rng) const;

private:
    std::vector<double> cumulative_;
    std::vector<std::vector<int>> signals_;  // [joint profile][agent]
    std::vector<int> alphabet_sizes_;
};

CountProfile sample_path(const InfoStructure& info, const SimulationPlan& plan, std::size_t path);
/// All paths of the plan, in path order.
std::vector<CountProfile> sample_paths(const InfoStructure& info, const SimulationPlan& plan);

using ProfilePredicate = std::function<bool(const CountProfile&)>;

/// Predicate form of the identified ball, usable at any horizon.
ProfilePredicate ball_predicate(const InfoStructure& info, const Rational& radius, std::span<const std::size_t> cell);

Estimate estimate_event(const InfoStructure& info, const SimulationPlan& plan, const ProfilePredicate& predicate);
/// Membership of (plan state, sampled profile) in `event`. Throws
/// std::invalid_argument when the horizons differ.
Estimate estimate_event(const InfoStructure& info, const SimulationPlan& plan, const EpistemicEvent& event);

struct PredictionBin {
    CountVector own;
    std::size_t n = 0;
    std::size_t hits = 0;
};

struct ConditionalPredictionReport {
    Estimate overall;
    Rational threshold;  // (1 - contraction coefficient) * radius
    std::size_t min_occupancy = 30;
    std::optional<double> min_bin_frequency;  // over bins with enough paths
    std::size_t bins_used = 0;
    std::size_t bins_sparse = 0;
    std::size_t paths_in_sparse_bins = 0;
    std::vector<PredictionBin> bins;  // every observed own count, by rank
};

/// Estimates P^state(TV(own empirical * M, counterparty empirical) <=
/// (1 - lambda) radius), with M the prediction matrix from `agent` to
/// `other` and lambda the global contraction coefficient, overall and per
/// observed own count vector.
ConditionalPredictionReport verify_conditional_prediction(const InfoStructure& info, std::size_t state,
                                                          std::size_t agent, std::size_t other, int horizon,
                                                          const Rational& radius, std::size_t paths,
                                                          std::uint64_t seed, std::size_t min_occupancy = 30);

enum class CurveMode { exact, montecarlo };

struct CurveRow {
    int horizon = 0;
    double ball = 0.0;
    std::optional<double> ball_standard_error;  // montecarlo mode
    std::optional<double> mutual;                // exact mode
    std::optional<double> common;                // exact mode
    std::optional<int> common_iterations;
};

struct CurveOptions {
    CurveMode mode = CurveMode::exact;
    std::size_t paths = 100000;
    std::uint64_t seed = 0;
    EngineLimits limits{};
};

/// One row per horizon: P^state of the identified ball of `cell`, and in
/// exact mode of the mutual and common q-belief in the state event of `cell`.
std::vector<CurveRow> convergence_curve(const InfoStructure& info, std::size_t state, double q, const Rational& radius,
                                        std::span<const std::size_t> cell, std::span<const int> horizons,
                                        const CurveOptions& options = {});

}  // namespace commonlearn
