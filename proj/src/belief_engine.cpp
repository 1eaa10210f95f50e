#include "commonlearn/belief_engine.hpp"

#include "commonlearn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace commonlearn {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_lengths(std::size_t a, std::size_t b) {
    if (a != b)
        throw std::invalid_argument("length mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

void check_counts(const InfoStructure& info, std::size_t agent, const CountVector& c) {
    if (agent >= info.num_agents()) throw std::out_of_range("agent index out of range");
    if (c.counts.size() != static_cast<std::size_t>(info.alphabet_size(agent)))
        throw std::invalid_argument("count vector length does not match the agent's alphabet");
    for (int v : c.counts)
        if (v < 0) throw std::invalid_argument("negative count");
}

// log multinomial pmf of `counts` under probabilities with logs `logp`.
double log_multinomial(const LogFactorials& lf, std::span<const int> counts, std::span<const double> logp) {
    int n = 0;
    double s = 0.0;
    for (std::size_t x = 0; x < counts.size(); ++x) {
        const int c = counts[x];
        n += c;
        s -= lf(c);
        if (c > 0) {
            if (logp[x] == kNegInf) return kNegInf;
            s += c * logp[x];
        }
    }
    return s + lf(n);
}

}  // namespace

double log_add(double a, double b) noexcept {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

double tv_distance(std::span<const double> a, std::span<const double> b) {
    check_lengths(a.size(), b.size());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return 0.5 * s;
}

Rational tv_distance(const std::vector<Rational>& a, const std::vector<Rational>& b) {
    check_lengths(a.size(), b.size());
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += abs(Rational(a[i] - b[i]));
    return s / 2;
}

double kl_divergence(std::span<const double> a, std::span<const double> b) {
    check_lengths(a.size(), b.size());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] <= 0.0) continue;
        if (b[i] <= 0.0) return std::numeric_limits<double>::infinity();
        s += a[i] * std::log(a[i] / b[i]);
    }
    return std::max(s, 0.0);
}

double binary_kl(double x, double y) {
    const double a[2] = {x, 1.0 - x};
    const double b[2] = {y, 1.0 - y};
    return kl_divergence(a, b);
}

double log_likelihood(const InfoStructure& info, std::size_t agent, std::size_t state, const CountVector& c) {
    check_counts(info, agent, c);
    const auto& logm = info.log_marginal(state, agent);
    double s = 0.0;
    for (std::size_t x = 0; x < c.counts.size(); ++x) {
        if (c.counts[x] == 0) continue;
        if (logm[x] == kNegInf) return kNegInf;
        s += c.counts[x] * logm[x];
    }
    return s;
}

std::vector<double> log_posterior(const InfoStructure& info, std::size_t agent, const CountVector& c) {
    const std::size_t n = info.num_states();
    std::vector<double> w(n);
    double top = kNegInf;
    for (std::size_t s = 0; s < n; ++s) {
        w[s] = info.log_prior(s) + log_likelihood(info, agent, s, c);
        top = std::max(top, w[s]);
    }
    if (top == kNegInf) throw InfeasibleCounts("counts have probability zero under every state");
    double z = 0.0;
    for (double v : w) z += std::exp(v - top);
    const double log_z = top + std::log(z);
    for (double& v : w) v -= log_z;
    return w;
}

std::vector<double> posterior(const InfoStructure& info, std::size_t agent, const CountVector& c) {
    auto w = log_posterior(info, agent, c);
    for (double& v : w) v = std::exp(v);
    return w;
}

std::vector<Rational> posterior_exact(const InfoStructure& info, std::size_t agent, const CountVector& c) {
    check_counts(info, agent, c);
    const std::size_t n = info.num_states();
    std::vector<Rational> w(n);
    Rational z = 0;
    for (std::size_t s = 0; s < n; ++s) {
        Rational v = info.prior(s);
        const auto& m = info.marginal(s, agent);
        for (std::size_t x = 0; x < c.counts.size(); ++x) {
            const auto k = static_cast<unsigned long>(c.counts[x]);
            if (k == 0) continue;
            mpz_class num, den;
            mpz_pow_ui(num.get_mpz_t(), m[x].get_num_mpz_t(), k);
            mpz_pow_ui(den.get_mpz_t(), m[x].get_den_mpz_t(), k);
            Rational p(num, den);
            p.canonicalize();
            v *= p;
        }
        w[s] = v;
        z += v;
    }
    if (z == 0) throw InfeasibleCounts("counts have probability zero under every state");
    for (auto& v : w) v /= z;
    return w;
}

double posterior_set(const InfoStructure& info, std::size_t agent, const CountVector& c,
                     std::span<const std::size_t> states) {
    for (std::size_t s : states)
        if (s >= info.num_states()) throw std::out_of_range("state index out of range");
    const auto post = posterior(info, agent, c);
    std::vector<bool> seen(post.size(), false);
    double sum = 0.0;
    for (std::size_t s : states) {
        if (seen[s]) continue;
        seen[s] = true;
        sum += post[s];
    }
    return std::min(sum, 1.0);
}

// ---------------------------------------------------------------------------

EngineLimits EngineLimits::with_horizon_cap(int cap) {
    if (cap < 0) throw std::invalid_argument("negative horizon cap");
    EngineLimits l;
    const double scale = (cap + 1.0) / 601.0;
    l.horizon_cap = cap;
    l.profile_budget = (cap + 1.0) * (cap + 1.0);
    l.work_budget *= std::max(1.0, scale * scale * scale);
    return l;
}

EngineLimits EngineLimits::for_structure(const InfoStructure& info) {
    return info.horizon_cap() ? with_horizon_cap(*info.horizon_cap()) : EngineLimits{};
}

namespace {

bool binary_pair(const InfoStructure& info) {
    return info.num_agents() == 2 && info.alphabet_size(0) == 2 && info.alphabet_size(1) == 2;
}

double recursion_work(const InfoStructure& info, int t) {
    double work = 0.0;
    for (int h = 1; h <= t; ++h)
        work += static_cast<double>(ProfileSpace::count(h - 1, info.alphabet_sizes())) *
                static_cast<double>(info.num_signal_profiles());
    return work;
}

}  // namespace

void check_capacity(const InfoStructure& info, int t, const EngineLimits& limits) {
    if (t < 0) throw std::invalid_argument("negative horizon");
    if (t > limits.horizon_cap)
        throw CapacityError("horizon " + std::to_string(t) + " exceeds the exact-engine horizon cap " +
                            std::to_string(limits.horizon_cap));
    const double profiles = static_cast<double>(ProfileSpace::count(t, info.alphabet_sizes()));
    if (profiles > limits.profile_budget)
        throw CapacityError("count-profile space of " + std::to_string(profiles) + " at horizon " + std::to_string(t) +
                            " exceeds the profile budget " + std::to_string(limits.profile_budget));
}

double OwnCountLaw::probability(const CountVector& c) const { return std::exp(log_prob.at(space.rank(c))); }

bool CountLaw::in_support(std::size_t index) const { return log_prob.at(index) != kNegInf; }

double CountLaw::probability(std::size_t index) const { return std::exp(log_prob.at(index)); }

double CountLaw::probability(const CountProfile& profile) const { return probability(space.index(profile)); }

double CountLaw::total() const {
    double s = 0.0;
    for (double v : log_prob) s += std::exp(v);
    return s;
}

OwnCountLaw own_count_law(const InfoStructure& info, std::size_t state, std::size_t agent, int t,
                          const EngineLimits& limits) {
    if (t < 0) throw std::invalid_argument("negative horizon");
    if (t > limits.horizon_cap)
        throw CapacityError("horizon " + std::to_string(t) + " exceeds the exact-engine horizon cap " +
                            std::to_string(limits.horizon_cap));
    OwnCountLaw law;
    law.state = state;
    law.agent = agent;
    law.space = CountSpace(t, info.alphabet_size(agent));
    const auto& logm = info.log_marginal(state, agent);
    const LogFactorials lf(t);
    law.log_prob.resize(law.space.size());
    for (std::size_t r = 0; r < law.space.size(); ++r)
        law.log_prob[r] = log_multinomial(lf, law.space.at(r).counts, logm);
    return law;
}

namespace {

// Two binary agents: P(a zeros for agent 1, b zeros for agent 2) is a sum over
// the number k of periods where both saw signal 0. The summand is log-concave
// in k, so it is summed outward from its mode until the geometric tail bound
// drops below double resolution.
double binary_cell(const LogFactorials& lf, int t, int a, int b, const double lp[4], const double p[4],
                   bool all_positive) {
    const int lo = std::max(0, a + b - t);
    const int hi = std::min(a, b);
    auto term = [&](int k) {
        const int k01 = a - k, k10 = b - k, k11 = t - a - b + k;
        double v = lf(t) - lf(k) - lf(k01) - lf(k10) - lf(k11);
        const int n[4] = {k, k01, k10, k11};
        for (int i = 0; i < 4; ++i) {
            if (n[i] == 0) continue;
            if (lp[i] == kNegInf) return kNegInf;
            v += n[i] * lp[i];
        }
        return v;
    };
    if (!all_positive) {
        double acc = kNegInf;
        for (int k = lo; k <= hi; ++k) acc = log_add(acc, term(k));
        return acc;
    }
    const double odds = p[0] * p[3] / (p[1] * p[2]);
    // ratio(k) = term(k+1)/term(k), decreasing in k.
    auto ratio = [&](int k) {
        return static_cast<double>(a - k) * static_cast<double>(b - k) /
               (static_cast<double>(k + 1) * static_cast<double>(t - a - b + k + 1)) * odds;
    };
    int left = lo, right = hi;
    while (left < right) {
        const int mid = left + (right - left) / 2;
        if (ratio(mid) >= 1.0)
            left = mid + 1;
        else
            right = mid;
    }
    const int mode = left;
    const double log_mode = term(mode);
    double sum = 1.0;
    double rel = 1.0;
    for (int k = mode; k < hi; ++k) {
        const double r = ratio(k);
        rel *= r;
        sum += rel;
        const double next = ratio(k + 1);
        if (next < 1.0 && rel * next / (1.0 - next) < 1e-17 * sum) break;
    }
    rel = 1.0;
    for (int k = mode; k > lo; --k) {
        const double r = 1.0 / ratio(k - 1);
        rel *= r;
        sum += rel;
        if (k - 1 > lo) {
            const double next = 1.0 / ratio(k - 2);
            if (next < 1.0 && rel * next / (1.0 - next) < 1e-17 * sum) break;
        }
    }
    return log_mode + std::log(sum);
}

CountLaw binary_joint_law(const InfoStructure& info, std::size_t state, int t) {
    CountLaw law;
    law.state = state;
    law.space = ProfileSpace(t, info.alphabet_sizes());
    law.log_prob.assign(law.space.size(), kNegInf);
    const auto jv = info.joint_values(state);
    double p[4], lp[4];
    bool all_positive = true;
    for (int i = 0; i < 4; ++i) {
        p[i] = jv[static_cast<std::size_t>(i)];
        lp[i] = p[i] > 0.0 ? std::log(p[i]) : kNegInf;
        all_positive = all_positive && p[i] > 0.0;
    }
    const LogFactorials lf(t);
    // Agent 0 is the most significant coordinate and rank == number of zeros.
    for (int a = 0; a <= t; ++a)
        for (int b = 0; b <= t; ++b)
            law.log_prob[static_cast<std::size_t>(a) * law.space.stride(0) + static_cast<std::size_t>(b)] =
                binary_cell(lf, t, a, b, lp, p, all_positive);
    return law;
}

CountLaw recursion_joint_law(const InfoStructure& info, std::size_t state, int t) {
    const std::size_t agents = info.num_agents();
    const auto& sizes = info.alphabet_sizes();
    const auto jv = info.joint_values(state);
    const std::size_t nx = info.num_signal_profiles();
    std::vector<double> ljv(nx);
    for (std::size_t x = 0; x < nx; ++x) ljv[x] = jv[x] > 0.0 ? std::log(jv[x]) : kNegInf;

    ProfileSpace cur(0, sizes);
    std::vector<double> lp(cur.size(), 0.0);
    for (int h = 0; h < t; ++h) {
        ProfileSpace next(h + 1, sizes);
        // successor[agent][old rank * k + signal] = rank after one more signal
        std::vector<std::vector<std::size_t>> successor(agents);
        for (std::size_t l = 0; l < agents; ++l) {
            const auto& from = cur.agent_space(l);
            const auto& to = next.agent_space(l);
            const int k = sizes[l];
            successor[l].resize(from.size() * static_cast<std::size_t>(k));
            for (std::size_t r = 0; r < from.size(); ++r) {
                auto c = from.at(r);
                for (int s = 0; s < k; ++s) {
                    ++c.counts[static_cast<std::size_t>(s)];
                    successor[l][r * static_cast<std::size_t>(k) + static_cast<std::size_t>(s)] = to.rank(c);
                    --c.counts[static_cast<std::size_t>(s)];
                }
            }
        }
        std::vector<double> nlp(next.size(), kNegInf);
        for (std::size_t i = 0; i < cur.size(); ++i) {
            if (lp[i] == kNegInf) continue;
            for (std::size_t x = 0; x < nx; ++x) {
                if (ljv[x] == kNegInf) continue;
                std::size_t j = 0;
                for (std::size_t l = 0; l < agents; ++l) {
                    const auto r = cur.agent_rank(i, l);
                    const auto s = static_cast<std::size_t>(info.signal_of(x, l));
                    j += successor[l][r * static_cast<std::size_t>(sizes[l]) + s] * next.stride(l);
                }
                nlp[j] = log_add(nlp[j], lp[i] + ljv[x]);
            }
        }
        cur = std::move(next);
        lp = std::move(nlp);
    }
    CountLaw law;
    law.state = state;
    law.space = std::move(cur);
    law.log_prob = std::move(lp);
    return law;
}

}  // namespace

CountLaw joint_count_law(const InfoStructure& info, std::size_t state, int t, const EngineLimits& limits,
                         JointLawMethod method) {
    if (state >= info.num_states()) throw std::out_of_range("state index out of range");
    check_capacity(info, t, limits);
    if (method == JointLawMethod::automatic && binary_pair(info)) return binary_joint_law(info, state, t);
    const double work = recursion_work(info, t);
    if (work > limits.work_budget)
        throw CapacityError("count-law recursion needs " + std::to_string(work) + " steps at horizon " +
                            std::to_string(t) + ", above the work budget " + std::to_string(limits.work_budget));
    return recursion_joint_law(info, state, t);
}

OwnCountLaw conditional_counterparty_law(const InfoStructure& info, std::size_t state, std::size_t agent,
                                         const CountVector& c, std::size_t other, const EngineLimits& limits) {
    check_counts(info, agent, c);
    if (other >= info.num_agents()) throw std::out_of_range("agent index out of range");
    if (agent == other) throw std::invalid_argument("counterparty must differ from the agent");
    const int t = c.horizon();
    check_capacity(info, t, limits);

    const auto pair = pairwise_marginal(info, state, agent, other);
    const auto& own = info.marginal(state, agent);
    const int k_other = info.alphabet_size(other);
    const LogFactorials lf(t);

    CountSpace space(0, k_other);
    std::vector<double> lp{0.0};
    for (std::size_t x = 0; x < c.counts.size(); ++x) {
        const int n = c.counts[x];
        if (n == 0) continue;
        if (own[x] == 0) throw InfeasibleCounts("counts have probability zero in this state");
        std::vector<double> row(static_cast<std::size_t>(k_other));
        for (int y = 0; y < k_other; ++y) {
            const double m = to_double(pair[x][static_cast<std::size_t>(y)] / own[x]);
            row[static_cast<std::size_t>(y)] = m > 0.0 ? std::log(m) : kNegInf;
        }
        const CountSpace draw(n, k_other);
        std::vector<double> draw_lp(draw.size());
        std::vector<CountVector> draw_counts(draw.size());
        for (std::size_t r = 0; r < draw.size(); ++r) {
            draw_counts[r] = draw.at(r);
            draw_lp[r] = log_multinomial(lf, draw_counts[r].counts, row);
        }
        CountSpace next(space.horizon() + n, k_other);
        std::vector<double> nlp(next.size(), kNegInf);
        for (std::size_t i = 0; i < space.size(); ++i) {
            if (lp[i] == kNegInf) continue;
            const auto base = space.at(i);
            for (std::size_t r = 0; r < draw.size(); ++r) {
                if (draw_lp[r] == kNegInf) continue;
                auto sum = base;
                for (std::size_t y = 0; y < sum.counts.size(); ++y) sum.counts[y] += draw_counts[r].counts[y];
                const auto j = next.rank(sum);
                nlp[j] = log_add(nlp[j], lp[i] + draw_lp[r]);
            }
        }
        space = next;
        lp = std::move(nlp);
    }
    OwnCountLaw law;
    law.state = state;
    law.agent = other;
    law.space = space;
    law.log_prob = std::move(lp);
    return law;
}

}  // namespace commonlearn
