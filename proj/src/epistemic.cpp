#include "commonlearn/epistemic.hpp"

#include "commonlearn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace commonlearn {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_q(double q) {
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("belief level q must lie in [0, 1]");
}

void check_event(const EpistemicModel& model, const EpistemicEvent& event) {
    if (event.num_states() != model.num_states())
        throw std::invalid_argument("event state count does not match the model");
    if (!(event.space() == model.space()))
        throw std::invalid_argument("event horizon " + std::to_string(event.horizon()) +
                                    " does not match model horizon " + std::to_string(model.horizon()));
}

}  // namespace

std::string_view to_string(EventOrigin origin) {
    switch (origin) {
        case EventOrigin::custom: return "custom";
        case EventOrigin::state_cylinder: return "state-cylinder";
        case EventOrigin::ball: return "ball";
        case EventOrigin::belief_image: return "belief-image";
        case EventOrigin::intersection: return "intersection";
        case EventOrigin::union_of: return "union";
        case EventOrigin::complement: return "complement";
    }
    return "custom";
}

// ---------------------------------------------------------------------------

EpistemicEvent::EpistemicEvent(std::size_t num_states, ProfileSpace space, EventOrigin origin, bool filled)
    : num_states_(num_states), space_(std::move(space)), origin_(origin),
      bits_(num_states_ * space_.size(), filled ? 1 : 0) {}

bool EpistemicEvent::contains(std::size_t state, const CountProfile& profile) const {
    if (state >= num_states_) throw std::out_of_range("state index out of range");
    if (profile.horizon() != horizon()) throw std::invalid_argument("profile horizon does not match the event");
    return contains(state, space_.index(profile));
}

std::size_t EpistemicEvent::count() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

bool EpistemicEvent::empty() const noexcept {
    return std::none_of(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b != 0; });
}

bool EpistemicEvent::full() const noexcept {
    return std::all_of(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b != 0; });
}

void EpistemicEvent::check_compatible(const EpistemicEvent& other) const {
    if (num_states_ != other.num_states_) throw std::invalid_argument("events have different state counts");
    if (!(space_ == other.space_))
        throw std::invalid_argument("events live at different horizons (" + std::to_string(horizon()) + " vs " +
                                    std::to_string(other.horizon()) + ")");
}

bool EpistemicEvent::subset_of(const EpistemicEvent& other) const {
    check_compatible(other);
    for (std::size_t i = 0; i < bits_.size(); ++i)
        if (bits_[i] && !other.bits_[i]) return false;
    return true;
}

EpistemicEvent& EpistemicEvent::operator&=(const EpistemicEvent& other) {
    check_compatible(other);
    for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] &= other.bits_[i];
    origin_ = EventOrigin::intersection;
    return *this;
}

EpistemicEvent& EpistemicEvent::operator|=(const EpistemicEvent& other) {
    check_compatible(other);
    for (std::size_t i = 0; i < bits_.size(); ++i) bits_[i] |= other.bits_[i];
    origin_ = EventOrigin::union_of;
    return *this;
}

EpistemicEvent EpistemicEvent::operator~() const {
    EpistemicEvent out = *this;
    for (auto& b : out.bits_) b = b ? 0 : 1;
    out.origin_ = EventOrigin::complement;
    return out;
}

// ---------------------------------------------------------------------------

TvBall::TvBall(const std::vector<Rational>& center, const Rational& radius) : center_(center), radius_(radius) {
    if (radius < 0) throw std::invalid_argument("negative ball radius");
    mpz_class denom = 1;
    for (const auto& c : center_) mpz_lcm(denom.get_mpz_t(), denom.get_mpz_t(), c.get_den_mpz_t());
    const mpz_class limit = mpz_class(1) << 40;
    small_ = denom < limit && radius_.get_num() < limit && radius_.get_den() < limit;
    if (!small_) return;
    denom_ = denom.get_si();
    r_num_ = radius_.get_num().get_si();
    r_den_ = radius_.get_den().get_si();
    for (const auto& c : center_) {
        const mpz_class n = c.get_num() * (denom / c.get_den());
        numerators_.push_back(n.get_si());
    }
}

bool TvBall::contains(std::span<const int> counts) const {
    if (counts.size() != center_.size()) throw std::invalid_argument("count vector length does not match the ball");
    long long t = 0;
    for (int c : counts) t += c;
    if (t <= 0) return false;
    if (small_ && t < (1LL << 20)) {
        // r_den * sum |c D - t n| <= 2 r_num t D
        __int128 dist = 0;
        for (std::size_t x = 0; x < counts.size(); ++x) {
            __int128 d = static_cast<__int128>(counts[x]) * denom_ - static_cast<__int128>(t) * numerators_[x];
            dist += d < 0 ? -d : d;
        }
        return dist * r_den_ <= static_cast<__int128>(2) * r_num_ * t * denom_;
    }
    Rational s = 0;
    for (std::size_t x = 0; x < counts.size(); ++x) s += abs(Rational(Rational(counts[x]) / Rational(static_cast<long>(t)) - center_[x]));
    return s <= 2 * radius_;
}

// ---------------------------------------------------------------------------

EpistemicModel::EpistemicModel(InfoStructure info, int t)
    : EpistemicModel(std::move(info), t, EngineLimits{}) {}

EpistemicModel::EpistemicModel(InfoStructure info, int t, const EngineLimits& limits)
    : info_(std::move(info)) {
    check_capacity(info_, t, limits);
    space_ = ProfileSpace(t, info_.alphabet_sizes());
    const std::size_t states = info_.num_states();
    const std::size_t agents = info_.num_agents();
    const std::size_t n = space_.size();

    laws_.reserve(states);
    for (std::size_t s = 0; s < states; ++s) laws_.push_back(joint_count_law(info_, s, t, limits));

    weights_.assign(agents, std::vector<double>(states * n, 0.0));
    for (std::size_t l = 0; l < agents; ++l) {
        const auto& own_space = space_.agent_space(l);
        std::vector<std::vector<double>> own_log(states);
        for (std::size_t s = 0; s < states; ++s) own_log[s] = own_count_law(info_, s, l, t, limits).log_prob;
        // log posterior per own rank; rows of -inf for counts no state can produce
        std::vector<std::vector<double>> post(own_space.size());
        for (std::size_t r = 0; r < own_space.size(); ++r) {
            try {
                post[r] = log_posterior(info_, l, own_space.at(r));
            } catch (const InfeasibleCounts&) {
                post[r].assign(states, kNegInf);
            }
        }
        auto& w = weights_[l];
        for (std::size_t s = 0; s < states; ++s) {
            const auto& lp = laws_[s].log_prob;
            for (std::size_t p = 0; p < n; ++p) {
                if (lp[p] == kNegInf) continue;
                const auto r = space_.agent_rank(p, l);
                const double lw = post[r][s] + lp[p] - own_log[s][r];
                if (lw != kNegInf) w[s * n + p] = std::exp(lw);
            }
        }
    }
}

EpistemicEvent EpistemicModel::empty_event() const { return EpistemicEvent(num_states(), space_); }

EpistemicEvent EpistemicModel::full_event() const {
    return EpistemicEvent(num_states(), space_, EventOrigin::custom, true);
}

// ---------------------------------------------------------------------------

EpistemicEvent state_event(const EpistemicModel& model, std::span<const std::size_t> states) {
    EpistemicEvent e(model.num_states(), model.space(), EventOrigin::state_cylinder);
    const std::size_t n = model.space().size();
    for (std::size_t s : states) {
        if (s >= model.num_states()) throw std::out_of_range("state index out of range");
        for (std::size_t p = 0; p < n; ++p) e.set(s, p);
    }
    return e;
}

namespace {

// ranks_in_ball[agent][rank] for the ball around `state`'s marginals.
std::vector<std::vector<bool>> ball_ranks(const EpistemicModel& model, const Rational& radius, std::size_t state) {
    const auto& info = model.info();
    std::vector<std::vector<bool>> in(info.num_agents());
    for (std::size_t l = 0; l < info.num_agents(); ++l) {
        const TvBall ball(info.marginal(state, l), radius);
        const auto& sp = model.space().agent_space(l);
        in[l].resize(sp.size());
        for (std::size_t r = 0; r < sp.size(); ++r) in[l][r] = ball.contains(sp.at(r).counts);
    }
    return in;
}

}  // namespace

EpistemicEvent empirical_ball_event(const EpistemicModel& model, const Rational& radius, std::size_t state) {
    if (state >= model.num_states()) throw std::out_of_range("state index out of range");
    EpistemicEvent e(model.num_states(), model.space(), EventOrigin::ball);
    if (model.horizon() == 0) return e;
    const auto in = ball_ranks(model, radius, state);
    const auto& sp = model.space();
    for (std::size_t p = 0; p < sp.size(); ++p) {
        bool member = true;
        for (std::size_t l = 0; l < sp.num_agents() && member; ++l) member = in[l][sp.agent_rank(p, l)];
        if (!member) continue;
        for (std::size_t s = 0; s < model.num_states(); ++s) e.set(s, p);
    }
    return e;
}

EpistemicEvent identified_ball_event(const EpistemicModel& model, const Rational& radius,
                                     std::span<const std::size_t> states) {
    EpistemicEvent e(model.num_states(), model.space(), EventOrigin::ball);
    for (std::size_t s : states) e |= empirical_ball_event(model, radius, s);
    e.set_origin(EventOrigin::ball);
    return e;
}

std::vector<double> individual_beliefs(const EpistemicModel& model, std::size_t agent, const EpistemicEvent& event) {
    check_event(model, event);
    if (agent >= model.num_agents()) throw std::out_of_range("agent index out of range");
    const auto& sp = model.space();
    const std::size_t ranks = sp.agent_space(agent).size();
    std::vector<double> mass(ranks, 0.0);
    std::vector<char> has_in(ranks, 0), has_out(ranks, 0);
    for (std::size_t s = 0; s < model.num_states(); ++s) {
        for (std::size_t p = 0; p < sp.size(); ++p) {
            const double w = model.weight(agent, s, p);
            if (w <= 0.0) continue;
            const auto r = sp.agent_rank(p, agent);
            if (event.contains(s, p)) {
                mass[r] += w;
                has_in[r] = 1;
            } else {
                has_out[r] = 1;
            }
        }
    }
    // Counts that lie entirely inside or outside the event get exact beliefs.
    for (std::size_t r = 0; r < ranks; ++r) {
        if (!has_out[r])
            mass[r] = 1.0;
        else if (!has_in[r])
            mass[r] = 0.0;
        else
            mass[r] = std::clamp(mass[r], 0.0, 1.0);
    }
    return mass;
}

EpistemicEvent individual_belief_operator(const EpistemicModel& model, double q, std::size_t agent,
                                          const EpistemicEvent& event, double slack) {
    check_q(q);
    const auto beliefs = individual_beliefs(model, agent, event);
    EpistemicEvent out(model.num_states(), model.space(), EventOrigin::belief_image);
    const auto& sp = model.space();
    for (std::size_t p = 0; p < sp.size(); ++p) {
        if (beliefs[sp.agent_rank(p, agent)] < q - slack) continue;
        for (std::size_t s = 0; s < model.num_states(); ++s) out.set(s, p);
    }
    return out;
}

EpistemicEvent mutual_belief_operator(const EpistemicModel& model, double q, const EpistemicEvent& event,
                                      double slack) {
    EpistemicEvent out = model.full_event();
    for (std::size_t l = 0; l < model.num_agents(); ++l)
        out &= individual_belief_operator(model, q, l, event, slack);
    out.set_origin(EventOrigin::belief_image);
    return out;
}

CommonBeliefResult common_belief_event(const EpistemicModel& model, double q, const EpistemicEvent& event,
                                       CommonBeliefRule rule, double slack) {
    EpistemicEvent iterate = mutual_belief_operator(model, q, event, slack);
    EpistemicEvent running = iterate;
    std::vector<EpistemicEvent> seen{iterate};
    int iterations = 1;
    while (!running.empty()) {
        EpistemicEvent next = rule == CommonBeliefRule::iterate_then_intersect
                                  ? mutual_belief_operator(model, q, iterate, slack)
                                  : mutual_belief_operator(model, q, event & iterate, slack);
        // B is deterministic, so a repeated iterate means the sequence cycles
        // and the running intersection can no longer change.
        if (std::find(seen.begin(), seen.end(), next) != seen.end()) break;
        running &= next;
        seen.push_back(next);
        iterate = std::move(next);
        ++iterations;
    }
    running.set_origin(EventOrigin::belief_image);
    return {std::move(running), iterations};
}

EvidenceReport is_q_evident(const EpistemicModel& model, double q, const EpistemicEvent& event,
                            std::size_t max_witnesses, double slack) {
    check_q(q);
    std::vector<std::vector<double>> beliefs;
    for (std::size_t l = 0; l < model.num_agents(); ++l) beliefs.push_back(individual_beliefs(model, l, event));
    EvidenceReport report;
    report.q = q;
    report.slack = slack;
    const auto& sp = model.space();
    for (std::size_t s = 0; s < model.num_states(); ++s) {
        for (std::size_t p = 0; p < sp.size(); ++p) {
            if (!event.contains(s, p)) continue;
            bool ok = true;
            for (std::size_t l = 0; l < model.num_agents() && ok; ++l)
                ok = beliefs[l][sp.agent_rank(p, l)] >= q - slack;
            if (ok) continue;
            ++report.violations;
            if (report.witnesses.size() < max_witnesses) {
                EvidenceWitness w;
                w.state = s;
                w.profile = sp.at(p);
                for (std::size_t l = 0; l < model.num_agents(); ++l) w.beliefs.push_back(beliefs[l][sp.agent_rank(p, l)]);
                report.witnesses.push_back(std::move(w));
            }
        }
    }
    report.is_evident = report.violations == 0;
    return report;
}

double event_probability(const EpistemicModel& model, const EpistemicEvent& event, std::optional<std::size_t> state) {
    check_event(model, event);
    if (state && *state >= model.num_states()) throw std::out_of_range("state index out of range");
    const auto& sp = model.space();
    double total = 0.0;
    for (std::size_t s = 0; s < model.num_states(); ++s) {
        if (state && s != *state) continue;
        const auto& lp = model.law(s).log_prob;
        double sum = 0.0;
        for (std::size_t p = 0; p < sp.size(); ++p)
            if (event.contains(s, p) && lp[p] != kNegInf) sum += std::exp(lp[p]);
        total += state ? sum : model.info().prior_value(s) * sum;
    }
    return std::clamp(total, 0.0, 1.0);
}

// ---------------------------------------------------------------------------

namespace {

// Binomial(n, p) probabilities on the window where they exceed 1e-22,
// generated outward from the mode by the pmf ratio.
struct BinomialWindow {
    int lo = 0;
    std::vector<double> pmf;

    int hi() const { return lo + static_cast<int>(pmf.size()) - 1; }
};

BinomialWindow binomial_window(const LogFactorials& lf, int n, double p) {
    constexpr double cutoff = 1e-22;
    if (p <= 0.0) return {0, {1.0}};
    if (p >= 1.0) return {n, {1.0}};
    const int mode = std::clamp(static_cast<int>(std::floor((n + 1) * p)), 0, n);
    const double odds = p / (1.0 - p);
    const double peak = std::exp(lf(n) - lf(mode) - lf(n - mode) + mode * std::log(p) + (n - mode) * std::log1p(-p));
    std::vector<double> down, up;
    double v = peak;
    for (int k = mode; k > 0; --k) {
        v *= static_cast<double>(k) / (static_cast<double>(n - k + 1) * odds);
        if (v < cutoff) break;
        down.push_back(v);
    }
    v = peak;
    for (int k = mode; k < n; ++k) {
        v *= static_cast<double>(n - k) / static_cast<double>(k + 1) * odds;
        if (v < cutoff) break;
        up.push_back(v);
    }
    BinomialWindow w;
    w.lo = mode - static_cast<int>(down.size());
    w.pmf.assign(down.rbegin(), down.rend());
    w.pmf.push_back(peak);
    w.pmf.insert(w.pmf.end(), up.begin(), up.end());
    return w;
}

// Inclusive range of zero-counts a with |a/t - zero_prob| <= radius.
std::pair<int, int> binary_ball_range(const Rational& zero_prob, const Rational& radius, int t) {
    const Rational lo = t * (zero_prob - radius);
    const Rational hi = t * (zero_prob + radius);
    mpz_class lo_i, hi_i;
    mpz_cdiv_q(lo_i.get_mpz_t(), lo.get_num_mpz_t(), lo.get_den_mpz_t());
    mpz_fdiv_q(hi_i.get_mpz_t(), hi.get_num_mpz_t(), hi.get_den_mpz_t());
    const long a = std::max<long>(0, lo_i.get_si());
    const long b = std::min<long>(t, hi_i.get_si());
    return {static_cast<int>(a), static_cast<int>(b)};
}

// Two binary agents: agent 1's zero-count a is Bin(t, phi0) and, given a,
// agent 2's zero-count is J + K with J ~ Bin(a, m0) and K ~ Bin(t - a, m1),
// where m0, m1 are agent 2's zero probabilities given agent 1's signal.
double binary_pair_ball_probability(const InfoStructure& info, std::size_t state, int t, const Rational& radius,
                                    std::span<const std::size_t> cell) {
    if (t == 0) return 0.0;
    struct Box {
        std::pair<int, int> first, second;
    };
    std::vector<Box> boxes;
    for (std::size_t s : cell) {
        if (s >= info.num_states()) throw std::out_of_range("state index out of range");
        Box box{binary_ball_range(info.marginal(s, 0)[0], radius, t),
                binary_ball_range(info.marginal(s, 1)[0], radius, t)};
        if (box.first.first <= box.first.second && box.second.first <= box.second.second) boxes.push_back(box);
    }
    if (boxes.empty()) return 0.0;

    const auto jv = info.joint_values(state);
    const double phi0 = jv[0] + jv[1];
    const double phi1 = jv[2] + jv[3];
    const double m0 = phi0 > 0.0 ? jv[0] / phi0 : 0.0;
    const double m1 = phi1 > 0.0 ? jv[2] / phi1 : 0.0;
    const LogFactorials lf(t);

    const auto first = binomial_window(lf, t, phi0);
    double total = 0.0;
    std::vector<std::pair<int, int>> ranges, merged;
    std::vector<double> cdf;
    for (int a = first.lo; a <= first.hi(); ++a) {
        ranges.clear();
        for (const auto& box : boxes)
            if (box.first.first <= a && a <= box.first.second) ranges.push_back(box.second);
        if (ranges.empty()) continue;
        std::sort(ranges.begin(), ranges.end());
        merged.clear();
        for (const auto& r : ranges) {
            if (!merged.empty() && r.first <= merged.back().second + 1)
                merged.back().second = std::max(merged.back().second, r.second);
            else
                merged.push_back(r);
        }
        const auto j_law = binomial_window(lf, a, m0);
        const auto k_law = binomial_window(lf, t - a, m1);
        cdf.resize(k_law.pmf.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < cdf.size(); ++i) cdf[i] = acc += k_law.pmf[i];
        auto k_cdf = [&](int k) {
            if (k < k_law.lo) return 0.0;
            if (k >= k_law.hi()) return cdf.back();
            return cdf[static_cast<std::size_t>(k - k_law.lo)];
        };
        double cond = 0.0;
        for (int j = j_law.lo; j <= j_law.hi(); ++j) {
            double inside = 0.0;
            for (const auto& [lo, hi] : merged) inside += k_cdf(hi - j) - k_cdf(lo - j - 1);
            cond += j_law.pmf[static_cast<std::size_t>(j - j_law.lo)] * inside;
        }
        total += first.pmf[static_cast<std::size_t>(a - first.lo)] * std::clamp(cond, 0.0, 1.0);
    }
    return std::clamp(total, 0.0, 1.0);
}

}  // namespace

double ball_probability(const InfoStructure& info, std::size_t state, int t, const Rational& radius,
                        std::span<const std::size_t> cell, const EngineLimits& limits) {
    if (state >= info.num_states()) throw std::out_of_range("state index out of range");
    if (t < 0) throw std::invalid_argument("negative horizon");
    if (info.num_agents() == 2 && info.alphabet_size(0) == 2 && info.alphabet_size(1) == 2)
        return binary_pair_ball_probability(info, state, t, radius, cell);
    const EpistemicModel model(info, t, limits);
    return event_probability(model, identified_ball_event(model, radius, cell), state);
}

void write_event_csv(std::ostream& out, const EpistemicModel& model, const EpistemicEvent& event, bool members_only) {
    check_event(model, event);
    const auto& info = model.info();
    out << "state";
    for (std::size_t l = 0; l < info.num_agents(); ++l)
        for (int x = 0; x < info.alphabet_size(l); ++x)
            out << ",agent" << info.agent_label(l) << '_' << info.signal_label(l, x);
    out << ",member\n";
    const auto& sp = model.space();
    for (std::size_t s = 0; s < model.num_states(); ++s) {
        for (std::size_t p = 0; p < sp.size(); ++p) {
            const bool member = event.contains(s, p);
            if (members_only && !member) continue;
            out << info.state_label(s);
            for (const auto& c : sp.at(p).agents)
                for (int v : c.counts) out << ',' << v;
            out << ',' << (member ? 1 : 0) << '\n';
        }
    }
}

}  // namespace commonlearn
