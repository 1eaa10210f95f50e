#include "commonlearn/count_space.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace commonlearn {

int CountVector::horizon() const noexcept {
    int t = 0;
    for (int c : counts) t += c;
    return t;
}

std::vector<double> CountVector::empirical() const {
    const int t = horizon();
    if (t <= 0) throw std::domain_error("empirical measure is undefined at horizon 0");
    std::vector<double> out(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) out[i] = static_cast<double>(counts[i]) / t;
    return out;
}

int CountProfile::horizon() const {
    if (agents.empty()) return 0;
    const int t = agents.front().horizon();
    for (const auto& a : agents)
        if (a.horizon() != t) throw std::invalid_argument("count profile mixes horizons");
    return t;
}

namespace {

std::size_t binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::size_t r = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        if (r > std::numeric_limits<std::size_t>::max() / (n - k + i)) return std::numeric_limits<std::size_t>::max();
        r = r * (n - k + i) / i;
    }
    return r;
}

std::size_t saturating_mul(std::size_t a, std::size_t b) {
    if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a) return std::numeric_limits<std::size_t>::max();
    return a * b;
}

}  // namespace

std::size_t CountSpace::count(int horizon, int alphabet) {
    if (horizon < 0 || alphabet < 1) return 0;
    return binomial(static_cast<std::size_t>(horizon + alphabet - 1), static_cast<std::size_t>(alphabet - 1));
}

CountSpace::CountSpace(int horizon, int alphabet) : horizon_(horizon), alphabet_(alphabet) {
    if (horizon < 0) throw std::invalid_argument("negative horizon");
    if (alphabet < 1) throw std::invalid_argument("empty alphabet");
    size_ = count(horizon, alphabet);
}

CountVector CountSpace::at(std::size_t rank) const {
    if (rank >= size_) throw std::out_of_range("count vector rank out of range");
    CountVector c;
    c.counts.assign(static_cast<std::size_t>(alphabet_), 0);
    int remaining = horizon_;
    for (int j = 0; j + 1 < alphabet_; ++j) {
        const int parts_after = alphabet_ - j - 1;
        int v = 0;
        for (;; ++v) {
            const std::size_t block = count(remaining - v, parts_after);
            if (rank < block) break;
            rank -= block;
        }
        c.counts[static_cast<std::size_t>(j)] = v;
        remaining -= v;
    }
    c.counts.back() = remaining;
    return c;
}

std::size_t CountSpace::rank(std::span<const int> counts) const {
    if (counts.size() != static_cast<std::size_t>(alphabet_))
        throw std::invalid_argument("count vector has " + std::to_string(counts.size()) + " entries, expected " +
                                    std::to_string(alphabet_));
    int total = 0;
    for (int c : counts) {
        if (c < 0) throw std::invalid_argument("negative count");
        total += c;
    }
    if (total != horizon_)
        throw std::invalid_argument("count vector horizon " + std::to_string(total) + " != " + std::to_string(horizon_));
    std::size_t r = 0;
    int remaining = horizon_;
    for (int j = 0; j + 1 < alphabet_; ++j) {
        const int parts_after = alphabet_ - j - 1;
        for (int v = 0; v < counts[static_cast<std::size_t>(j)]; ++v) r += count(remaining - v, parts_after);
        remaining -= counts[static_cast<std::size_t>(j)];
    }
    return r;
}

ProfileSpace::ProfileSpace(int horizon, const std::vector<int>& alphabet_sizes)
    : horizon_(horizon), alphabets_(alphabet_sizes) {
    spaces_.reserve(alphabet_sizes.size());
    for (int k : alphabet_sizes) spaces_.emplace_back(horizon, k);
    strides_.assign(spaces_.size(), 1);
    size_ = 1;
    for (std::size_t l = spaces_.size(); l-- > 0;) {
        strides_[l] = size_;
        size_ = saturating_mul(size_, spaces_[l].size());
    }
}

std::size_t ProfileSpace::count(int horizon, const std::vector<int>& alphabet_sizes) {
    std::size_t n = 1;
    for (int k : alphabet_sizes) n = saturating_mul(n, CountSpace::count(horizon, k));
    return n;
}

CountProfile ProfileSpace::at(std::size_t index) const {
    CountProfile p;
    p.agents.reserve(spaces_.size());
    for (std::size_t l = 0; l < spaces_.size(); ++l) p.agents.push_back(spaces_[l].at(agent_rank(index, l)));
    return p;
}

std::size_t ProfileSpace::index(const CountProfile& profile) const {
    if (profile.agents.size() != spaces_.size()) throw std::invalid_argument("count profile has the wrong agent count");
    std::size_t idx = 0;
    for (std::size_t l = 0; l < spaces_.size(); ++l) idx += spaces_[l].rank(profile.agents[l]) * strides_[l];
    return idx;
}

std::size_t ProfileSpace::index_of_ranks(std::span<const std::size_t> ranks) const {
    std::size_t idx = 0;
    for (std::size_t l = 0; l < spaces_.size(); ++l) idx += ranks[l] * strides_[l];
    return idx;
}

LogFactorials::LogFactorials(int max) : table_(static_cast<std::size_t>(std::max(max, 0)) + 1) {
    for (std::size_t n = 0; n < table_.size(); ++n) table_[n] = std::lgamma(static_cast<double>(n) + 1.0);
}

}  // namespace commonlearn
