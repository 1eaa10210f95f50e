#include "commonlearn/bounds.hpp"

#include "commonlearn/contraction.hpp"
#include "commonlearn/epistemic.hpp"
#include "commonlearn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace commonlearn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_radius(double radius) {
    if (!(radius >= 0.0)) throw std::invalid_argument("ball radius must be nonnegative");
}

// Maximum of sum_x phi(x) g(x) over the TV ball of `radius` around `center`.
double max_linear_over_ball(std::span<const double> center, std::span<const double> g, double radius,
                            std::vector<double>& argmax) {
    const std::size_t k = center.size();
    argmax.assign(center.begin(), center.end());
    const auto best = static_cast<std::size_t>(std::max_element(g.begin(), g.end()) - g.begin());
    double amount = std::min(radius, 1.0 - center[best]);
    if (g[best] == kInf && amount > 0.0) return kInf;
    std::vector<std::size_t> donors(k);
    std::iota(donors.begin(), donors.end(), std::size_t{0});
    std::stable_sort(donors.begin(), donors.end(), [&](std::size_t a, std::size_t b) { return g[a] < g[b]; });
    double moved = 0.0;
    for (std::size_t x : donors) {
        if (x == best || moved >= amount) continue;
        const double take = std::min(argmax[x], amount - moved);
        argmax[x] -= take;
        moved += take;
    }
    argmax[best] += moved;
    double value = 0.0;
    for (std::size_t x = 0; x < k; ++x) {
        if (argmax[x] <= 0.0) continue;
        if (g[x] == -kInf) return -kInf;
        value += argmax[x] * g[x];
    }
    return value;
}

}  // namespace

KlGap kl_gap(const InfoStructure& info, std::size_t agent, std::size_t state, double radius) {
    check_radius(radius);
    if (state >= info.num_states()) throw std::out_of_range("state index out of range");
    const auto cells = identification_partition(info, agent);
    const auto& own = info.marginal_values(state, agent);
    KlGap gap;
    gap.agent = agent;
    gap.state = state;
    gap.value = kInf;
    double worst = -kInf;
    std::vector<double> g(own.size()), phi;
    for (std::size_t rival = 0; rival < info.num_states(); ++rival) {
        if (cells.cell_index(rival) == cells.cell_index(state)) continue;
        const auto& other = info.marginal_values(rival, agent);
        for (std::size_t x = 0; x < own.size(); ++x) {
            if (other[x] <= 0.0)
                g[x] = -kInf;
            else if (own[x] <= 0.0)
                g[x] = kInf;
            else
                g[x] = std::log(other[x] / own[x]);
        }
        const double v = max_linear_over_ball(own, g, radius, phi);
        if (!gap.rival || v > worst) {
            worst = v;
            gap.rival = rival;
            gap.argmax = phi;
        }
    }
    if (gap.rival) gap.value = -worst;
    return gap;
}

KlGap global_kl_gap(const InfoStructure& info, double radius) {
    KlGap best;
    best.value = kInf;
    for (std::size_t l = 0; l < info.num_agents(); ++l)
        for (std::size_t s = 0; s < info.num_states(); ++s) {
            auto g = kl_gap(info, l, s, radius);
            if (g.value < best.value || (!best.rival && g.rival)) best = std::move(g);
        }
    return best;
}

RadiusEstimate max_epsilon(const InfoStructure& info, double resolution) {
    RadiusEstimate est;
    if (!global_kl_gap(info, 0.0).rival) {
        est.degenerate = true;
        est.value = kInf;
        return est;
    }
    double lo = 0.0, hi = 1.0;
    if (global_kl_gap(info, hi).positive()) {
        est.value = hi;
        return est;
    }
    while (hi - lo > resolution) {
        const double mid = 0.5 * (lo + hi);
        (global_kl_gap(info, mid).positive() ? lo : hi) = mid;
    }
    est.value = lo;
    return est;
}

double sanov_exponent(const InfoStructure& info, std::size_t agent, std::size_t state, double radius) {
    check_radius(radius);
    const auto& center = info.marginal_values(state, agent);
    const std::size_t k = center.size();
    if (k > 24) throw CapacityError("Sanov exponent enumerates signal subsets; alphabet too large");
    // Outside the ball the mass of some signal set S exceeds its centre mass
    // by more than the radius; by data processing the cheapest such point
    // costs the binary divergence between the two masses of S.
    double best = kInf;
    for (std::size_t mask = 1; mask + 1 < (std::size_t{1} << k); ++mask) {
        double mass = 0.0;
        for (std::size_t x = 0; x < k; ++x)
            if (mask >> x & 1) mass += center[x];
        if (mass <= 0.0 || mass + radius >= 1.0) continue;
        best = std::min(best, binary_kl(mass + radius, mass));
    }
    return best;
}

SanovBounds sanov_bounds(const InfoStructure& info, std::size_t agent, std::size_t state, double radius, int t) {
    if (t < 1) throw std::invalid_argument("Sanov bounds need t >= 1");
    SanovBounds b;
    b.exponent = sanov_exponent(info, agent, state, radius);
    if (b.exponent == kInf) {
        b.lower = b.upper = 1.0;
        b.log_outside_lower = b.log_outside_upper = -kInf;
        return b;
    }
    const double k = info.alphabet_size(agent);
    const double lt = std::log(t + 1.0);
    b.log_outside_upper = k * lt - t * b.exponent;
    b.log_outside_lower = -k * lt - t * b.exponent;
    b.lower = std::clamp(1.0 - std::exp(b.log_outside_upper), 0.0, 1.0);
    b.upper = std::clamp(-std::expm1(b.log_outside_lower), 0.0, 1.0);
    return b;
}

double log_floor_complement(const InfoStructure& info, std::size_t state, double radius, int t) {
    if (t < 0) throw std::invalid_argument("negative horizon");
    const double b = global_kl_gap(info, radius).value;
    if (!(b > 0.0)) throw std::domain_error("radius exceeds the admissible radius (KL gap is not positive)");
    if (b == kInf) return -kInf;
    return -t * b - info.log_prior(state);
}

double posterior_floor(const InfoStructure& info, std::size_t state, double radius, int t) {
    const double lc = log_floor_complement(info, state, radius, t);
    return std::clamp(-std::expm1(lc), 0.0, 1.0);
}

double beta_for(double q, std::size_t agents) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("q must lie in (0, 1)");
    if (agents < 1) throw std::invalid_argument("need at least one agent");
    const double n = static_cast<double>(agents);
    auto margin = [&](double beta) {
        const double y = std::pow(q, beta);
        return y * (1.0 - n * (1.0 - y)) - q;
    };
    // margin(0) = 1 - q > 0 and margin(1) = -n q (1 - q) < 0; decreasing between.
    double lo = 0.0, hi = 1.0;
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        (margin(mid) > 0.0 ? lo : hi) = mid;
    }
    return lo;
}

namespace {

bool horizon_passes(const InfoStructure& info, const Partition& cells, int t, const Rational& radius, double level,
                    const EngineLimits& limits) {
    for (const auto& cell : cells.cells())
        for (std::size_t s : cell)
            if (!(ball_probability(info, s, t, radius, cell, limits) > level)) return false;
    return true;
}

// First t >= start opening a run of `window` passing horizons, or nullopt.
std::optional<int> first_run(const InfoStructure& info, const Partition& cells, int start, const Rational& radius,
                             double level, const ThresholdOptions& options) {
    int run = 0;
    for (int t = std::max(start, 1); t <= options.max_horizon; ++t) {
        run = horizon_passes(info, cells, t, radius, level, options.limits) ? run + 1 : 0;
        if (run == options.window) return t - options.window + 1;
    }
    return std::nullopt;
}

}  // namespace

TimeThreshold time_threshold(const InfoStructure& info, double q, double beta, double radius,
                             const ThresholdOptions& options) {
    if (options.window < 1) throw std::invalid_argument("window must be positive");
    const double b = global_kl_gap(info, radius).value;
    if (!(b > 0.0)) throw std::domain_error("radius exceeds the admissible radius (KL gap is not positive)");
    const double beta_star = beta_for(q, info.num_agents());
    if (!(beta > 0.0 && beta < beta_star))
        throw std::invalid_argument("beta must lie in (0, " + std::to_string(beta_star) + ")");

    TimeThreshold out;
    out.gap = b;
    out.q_beta = std::pow(q, beta);
    double log_time = 0.0;
    if (b != kInf)
        for (std::size_t s = 0; s < info.num_states(); ++s)
            log_time = std::max(log_time, std::log((1.0 - out.q_beta) * info.prior_value(s)) / -b);
    out.log_time = static_cast<int>(std::ceil(log_time));

    const Rational exact_radius = shortest_decimal(radius);
    const auto cells = common_identification(info);
    const auto run = first_run(info, cells, 1, exact_radius, out.q_beta, options);
    if (!run)
        throw CapacityError("no run of " + std::to_string(options.window) + " horizons with ball probabilities above " +
                            std::to_string(out.q_beta) + " up to horizon " + std::to_string(options.max_horizon));
    out.search_time = *run;
    out.threshold = std::max(out.search_time, out.log_time);
    if (!horizon_passes(info, cells, out.threshold, exact_radius, out.q_beta, options.limits)) {
        const auto later = first_run(info, cells, out.threshold, exact_radius, out.q_beta, options);
        if (!later)
            throw CapacityError("ball probabilities drop below " + std::to_string(out.q_beta) + " after horizon " +
                                std::to_string(out.threshold) + " within the search range");
        out.threshold = *later;
    }
    for (const auto& cell : cells.cells())
        for (std::size_t s : cell)
            out.certificates.push_back(
                {cell, s, ball_probability(info, s, out.threshold, exact_radius, cell, options.limits)});
    return out;
}

BoundSet compute_bounds(const InfoStructure& info, double q, double radius, std::optional<double> beta,
                        const ThresholdOptions& options) {
    BoundSet set;
    set.radius = radius;
    set.q = q;
    set.gap = global_kl_gap(info, radius);
    set.max_radius = max_epsilon(info);
    for (std::size_t l = 0; l < info.num_agents(); ++l)
        for (std::size_t s = 0; s < info.num_states(); ++s)
            set.exponents.push_back({l, s, sanov_exponent(info, l, s, radius)});
    set.beta_star = beta_for(q, info.num_agents());
    set.beta = beta.value_or(0.5 * set.beta_star);
    if (set.gap.positive()) set.threshold = time_threshold(info, q, set.beta, radius, options);
    set.contraction = info.num_agents() >= 2 ? global_contraction_coefficient(info) : Rational(0);
    return set;
}

}  // namespace commonlearn
