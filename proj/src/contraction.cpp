#include "commonlearn/contraction.hpp"

#include "commonlearn/belief_engine.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace commonlearn {

std::vector<std::vector<double>> PredictionMatrix::values() const {
    std::vector<std::vector<double>> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(to_doubles(r));
    return out;
}

namespace {

Rational defined_rows_coefficient(const std::vector<std::vector<Rational>>& rows,
                                  const std::vector<std::size_t>& undefined) {
    std::vector<std::vector<Rational>> defined;
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (std::find(undefined.begin(), undefined.end(), i) == undefined.end()) defined.push_back(rows[i]);
    return dobrushin_coefficient(defined);
}

// Rows only; the coefficient is left at zero so corrupted tensors can still be
// inspected by the consistency check.
PredictionMatrix raw_prediction_matrix(const InfoStructure& info, std::size_t state, std::size_t from,
                                       std::size_t to) {
    if (state >= info.num_states()) throw std::out_of_range("state index out of range");
    if (from >= info.num_agents() || to >= info.num_agents()) throw std::out_of_range("agent index out of range");
    if (from == to) throw std::invalid_argument("prediction matrix needs two distinct agents");
    PredictionMatrix m;
    m.state = state;
    m.from = from;
    m.to = to;
    m.rows = pairwise_marginal(info, state, from, to);
    const auto& own = info.marginal(state, from);
    for (std::size_t x = 0; x < m.rows.size(); ++x) {
        if (own[x] == 0) {
            m.undefined_rows.push_back(x);
            continue;
        }
        for (auto& v : m.rows[x]) v /= own[x];
    }
    return m;
}

}  // namespace

PredictionMatrix prediction_matrix(const InfoStructure& info, std::size_t state, std::size_t from, std::size_t to) {
    auto m = raw_prediction_matrix(info, state, from, to);
    m.coefficient = defined_rows_coefficient(m.rows, m.undefined_rows);
    return m;
}

std::vector<double> predict_counterparty(std::span<const double> own, const PredictionMatrix& m) {
    if (own.size() != m.num_rows())
        throw std::invalid_argument("distribution has " + std::to_string(own.size()) + " entries, matrix has " +
                                    std::to_string(m.num_rows()) + " rows");
    std::vector<double> out(m.num_cols(), 0.0);
    for (std::size_t x = 0; x < own.size(); ++x)
        for (std::size_t y = 0; y < out.size(); ++y) out[y] += own[x] * to_double(m.rows[x][y]);
    return out;
}

std::vector<Rational> predict_counterparty(const std::vector<Rational>& own, const PredictionMatrix& m) {
    if (own.size() != m.num_rows())
        throw std::invalid_argument("distribution has " + std::to_string(own.size()) + " entries, matrix has " +
                                    std::to_string(m.num_rows()) + " rows");
    std::vector<Rational> out(m.num_cols(), Rational(0));
    for (std::size_t x = 0; x < own.size(); ++x)
        for (std::size_t y = 0; y < out.size(); ++y) out[y] += own[x] * m.rows[x][y];
    return out;
}

Rational dobrushin_coefficient(const std::vector<std::vector<Rational>>& rows) {
    for (const auto& r : rows) {
        Rational s = 0;
        for (const auto& v : r) {
            if (v < 0) throw std::invalid_argument("matrix has a negative entry");
            s += v;
        }
        if (s != 1) throw std::invalid_argument("matrix row does not sum to one");
        if (r.size() != rows.front().size()) throw std::invalid_argument("ragged matrix");
    }
    Rational best = 0;
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = i + 1; j < rows.size(); ++j) {
            const Rational d = tv_distance(rows[i], rows[j]);
            if (d > best) best = d;
        }
    return best;
}

Rational global_contraction_coefficient(const InfoStructure& info) {
    Rational best = 0;
    for (std::size_t s = 0; s < info.num_states(); ++s)
        for (std::size_t a = 0; a < info.num_agents(); ++a)
            for (std::size_t b = 0; b < info.num_agents(); ++b) {
                if (a == b) continue;
                const auto c = prediction_matrix(info, s, a, b).coefficient;
                if (c > best) best = c;
            }
    return best;
}

ContractionCheck verify_contraction(const PredictionMatrix& m, std::span<const double> a, std::span<const double> b) {
    ContractionCheck c;
    const auto ma = predict_counterparty(a, m);
    const auto mb = predict_counterparty(b, m);
    c.lhs = tv_distance(ma, mb);
    c.rhs = to_double(m.coefficient) * tv_distance(a, b);
    c.holds = c.lhs <= c.rhs + 1e-12;
    return c;
}

std::vector<TightPair> tightness_vertices(const PredictionMatrix& m) {
    std::vector<TightPair> out;
    // A vertex pair (e_i, e_j) has TV 1 and maps to rows i and j.
    for (std::size_t i = 0; i < m.num_rows(); ++i)
        for (std::size_t j = i + 1; j < m.num_rows(); ++j) {
            const Rational d = tv_distance(m.rows[i], m.rows[j]);
            if (d == m.coefficient) out.push_back({i, j, d});
        }
    return out;
}

MarginalConsistency verify_marginal_consistency(const PredictionMatrix& m, const std::vector<Rational>& own,
                                                const std::vector<Rational>& counterparty) {
    MarginalConsistency r;
    r.state = m.state;
    r.from = m.from;
    r.to = m.to;
    const auto predicted = predict_counterparty(own, m);
    if (predicted.size() != counterparty.size())
        throw std::invalid_argument("counterparty marginal does not match the matrix width");
    r.exact = true;
    r.deviation.resize(counterparty.size());
    for (std::size_t y = 0; y < counterparty.size(); ++y) {
        r.deviation[y] = predicted[y] - counterparty[y];
        r.exact = r.exact && r.deviation[y] == 0;
    }
    return r;
}

std::vector<MarginalConsistency> verify_marginal_consistency(const InfoStructure& info) {
    std::vector<MarginalConsistency> out;
    for (std::size_t s = 0; s < info.num_states(); ++s)
        for (std::size_t a = 0; a < info.num_agents(); ++a)
            for (std::size_t b = 0; b < info.num_agents(); ++b) {
                if (a == b) continue;
                const auto m = raw_prediction_matrix(info, s, a, b);
                out.push_back(verify_marginal_consistency(m, info.marginal(s, a), info.marginal(s, b)));
            }
    return out;
}

}  // namespace commonlearn
