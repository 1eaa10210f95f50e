#include "commonlearn/montecarlo.hpp"

#include "commonlearn/contraction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>

namespace commonlearn {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Runs body(begin, end) over [0, n) split into contiguous chunks.
template <typename Body>
void parallel_chunks(std::size_t n, Body body) {
    const std::size_t workers = std::min(worker_count(), std::max<std::size_t>(n, 1));
    if (workers <= 1) {
        body(std::size_t{0}, n);
        return;
    }
    std::vector<std::thread> threads;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        if (begin >= end) break;
        threads.emplace_back([=] { body(begin, end); });
    }
    for (auto& t : threads) t.join();
}

void check_plan(const InfoStructure& info, const SimulationPlan& plan) {
    if (plan.state >= info.num_states()) throw std::out_of_range("state index out of range");
    if (plan.horizon < 0) throw std::invalid_argument("negative horizon");
    if (plan.paths < 1) throw std::invalid_argument("a plan needs at least one path");
}

}  // namespace

PathRng::PathRng(std::uint64_t seed, std::uint64_t path) noexcept
    : state_(mix(seed + kGolden) ^ mix(path * kGolden + 0x632BE59BD9B4E019ULL)) {}

std::uint64_t PathRng::next() noexcept {
    state_ += kGolden;
    return mix(state_);
}

Estimate Estimate::from_hits(std::size_t hits, std::size_t n) {
    if (n == 0) throw std::invalid_argument("estimate needs at least one sample");
    Estimate e;
    e.n = n;
    e.mean = static_cast<double>(hits) / static_cast<double>(n);
    e.standard_error = std::sqrt(e.mean * (1.0 - e.mean) / static_cast<double>(n));
    e.half_width = 3.0 * e.standard_error;
    return e;
}

std::size_t worker_count() {
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("COMMON_LEARNING_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap >= 1) n = std::min(n, static_cast<std::size_t>(cap));
    }
    return n;
}

// ---------------------------------------------------------------------------

PathSampler::PathSampler(const InfoStructure& info, std::size_t state) : alphabet_sizes_(info.alphabet_sizes()) {
    const auto jv = info.joint_values(state);
    cumulative_.resize(jv.size());
    double acc = 0.0;
    for (std::size_t x = 0; x < jv.size(); ++x) cumulative_[x] = acc += jv[x];
    signals_.resize(jv.size());
    for (std::size_t x = 0; x < jv.size(); ++x)
        for (std::size_t l = 0; l < info.num_agents(); ++l) signals_[x].push_back(info.signal_of(x, l));
}

CountProfile PathSampler::sample(int horizon, PathRng& rng) const {
    CountProfile p;
    p.agents.resize(alphabet_sizes_.size());
    for (std::size_t l = 0; l < alphabet_sizes_.size(); ++l)
        p.agents[l].counts.assign(static_cast<std::size_t>(alphabet_sizes_[l]), 0);
    const std::size_t last = cumulative_.size() - 1;
    for (int i = 0; i < horizon; ++i) {
        const double u = rng.uniform() * cumulative_.back();
        std::size_t x = 0;
        while (x < last && u >= cumulative_[x]) ++x;
        const auto& sig = signals_[x];
        for (std::size_t l = 0; l < sig.size(); ++l) ++p.agents[l].counts[static_cast<std::size_t>(sig[l])];
    }
    return p;
}

CountProfile sample_path(const InfoStructure& info, const SimulationPlan& plan, std::size_t path) {
    check_plan(info, plan);
    const PathSampler sampler(info, plan.state);
    PathRng rng(plan.seed, path);
    return sampler.sample(plan.horizon, rng);
}

std::vector<CountProfile> sample_paths(const InfoStructure& info, const SimulationPlan& plan) {
    check_plan(info, plan);
    const PathSampler sampler(info, plan.state);
    std::vector<CountProfile> out(plan.paths);
    parallel_chunks(plan.paths, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            PathRng rng(plan.seed, i);
            out[i] = sampler.sample(plan.horizon, rng);
        }
    });
    return out;
}

ProfilePredicate ball_predicate(const InfoStructure& info, const Rational& radius, std::span<const std::size_t> cell) {
    // balls[state in cell][agent]
    std::vector<std::vector<TvBall>> balls;
    for (std::size_t s : cell) {
        if (s >= info.num_states()) throw std::out_of_range("state index out of range");
        std::vector<TvBall> per_agent;
        for (std::size_t l = 0; l < info.num_agents(); ++l) per_agent.emplace_back(info.marginal(s, l), radius);
        balls.push_back(std::move(per_agent));
    }
    return [balls = std::move(balls)](const CountProfile& p) {
        for (const auto& per_agent : balls) {
            bool inside = true;
            for (std::size_t l = 0; l < per_agent.size() && inside; ++l) inside = per_agent[l].contains(p.agents[l].counts);
            if (inside) return true;
        }
        return false;
    };
}

Estimate estimate_event(const InfoStructure& info, const SimulationPlan& plan, const ProfilePredicate& predicate) {
    check_plan(info, plan);
    const PathSampler sampler(info, plan.state);
    std::vector<std::uint8_t> hit(plan.paths, 0);
    parallel_chunks(plan.paths, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            PathRng rng(plan.seed, i);
            hit[i] = predicate(sampler.sample(plan.horizon, rng)) ? 1 : 0;
        }
    });
    std::size_t hits = 0;
    for (auto h : hit) hits += h;
    return Estimate::from_hits(hits, plan.paths);
}

Estimate estimate_event(const InfoStructure& info, const SimulationPlan& plan, const EpistemicEvent& event) {
    if (event.horizon() != plan.horizon)
        throw std::invalid_argument("event horizon " + std::to_string(event.horizon()) + " does not match plan horizon " +
                                    std::to_string(plan.horizon));
    if (event.num_states() != info.num_states()) throw std::invalid_argument("event state count does not match");
    const std::size_t state = plan.state;
    return estimate_event(info, plan, [&event, state](const CountProfile& p) {
        return event.contains(state, event.space().index(p));
    });
}

// ---------------------------------------------------------------------------

ConditionalPredictionReport verify_conditional_prediction(const InfoStructure& info, std::size_t state,
                                                          std::size_t agent, std::size_t other, int horizon,
                                                          const Rational& radius, std::size_t paths,
                                                          std::uint64_t seed, std::size_t min_occupancy) {
    const SimulationPlan plan{state, horizon, paths, seed};
    check_plan(info, plan);
    const auto m = prediction_matrix(info, state, agent, other);
    ConditionalPredictionReport report;
    report.min_occupancy = min_occupancy;
    report.threshold = (1 - global_contraction_coefficient(info)) * radius;
    const Rational bound = 2 * report.threshold * horizon;
    const CountSpace own_space(horizon, info.alphabet_size(agent));

    const PathSampler sampler(info, state);
    std::vector<std::uint8_t> hit(paths, 0);
    std::vector<std::size_t> own_rank(paths, 0);
    parallel_chunks(paths, [&](std::size_t begin, std::size_t end) {
        Rational dist, cell;
        for (std::size_t i = begin; i < end; ++i) {
            PathRng rng(seed, i);
            const auto p = sampler.sample(horizon, rng);
            const auto& own = p.agents[agent].counts;
            const auto& theirs = p.agents[other].counts;
            // 2 t TV(own/t M, theirs/t) = sum_y |sum_x own_x M_xy - theirs_y|
            dist = 0;
            for (std::size_t y = 0; y < theirs.size(); ++y) {
                cell = -theirs[y];
                for (std::size_t x = 0; x < own.size(); ++x)
                    if (own[x] != 0) cell += own[x] * m.rows[x][y];
                dist += abs(cell);
            }
            hit[i] = horizon > 0 && dist <= bound ? 1 : 0;
            own_rank[i] = own_space.rank(own);
        }
    });

    std::size_t hits = 0;
    std::map<std::size_t, PredictionBin> bins;
    for (std::size_t i = 0; i < paths; ++i) {
        hits += hit[i];
        auto& bin = bins[own_rank[i]];
        ++bin.n;
        bin.hits += hit[i];
    }
    report.overall = Estimate::from_hits(hits, paths);
    for (auto& [rank, bin] : bins) {
        bin.own = own_space.at(rank);
        if (bin.n >= min_occupancy) {
            ++report.bins_used;
            const double f = static_cast<double>(bin.hits) / static_cast<double>(bin.n);
            report.min_bin_frequency = report.min_bin_frequency ? std::min(*report.min_bin_frequency, f) : f;
        } else {
            ++report.bins_sparse;
            report.paths_in_sparse_bins += bin.n;
        }
        report.bins.push_back(std::move(bin));
    }
    return report;
}

std::vector<CurveRow> convergence_curve(const InfoStructure& info, std::size_t state, double q, const Rational& radius,
                                        std::span<const std::size_t> cell, std::span<const int> horizons,
                                        const CurveOptions& options) {
    if (state >= info.num_states()) throw std::out_of_range("state index out of range");
    std::vector<CurveRow> rows;
    for (int t : horizons) {
        CurveRow row;
        row.horizon = t;
        if (options.mode == CurveMode::montecarlo) {
            const auto e = estimate_event(info, {state, t, options.paths, options.seed}, ball_predicate(info, radius, cell));
            row.ball = e.mean;
            row.ball_standard_error = e.standard_error;
        } else {
            const EpistemicModel model(info, t, options.limits);
            row.ball = event_probability(model, identified_ball_event(model, radius, cell), state);
            const auto target = state_event(model, cell);
            row.mutual = event_probability(model, mutual_belief_operator(model, q, target), state);
            const auto common = common_belief_event(model, q, target);
            row.common = event_probability(model, common.event, state);
            row.common_iterations = common.iterations;
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace commonlearn
