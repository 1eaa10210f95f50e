#pragma once

#include "commonlearn/info_structure.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace commonlearn {

/// Conditional law of agent `to`'s signal given agent `from`'s signal in one
/// state: entry (x, y) = P(x_to = y | x_from = x). Exact.
struct PredictionMatrix {
    std::size_t state = 0;
    std::size_t from = 0;
    std::size_t to = 0;
    std::vector<std::vector<Rational>> rows;
    /// Row indices whose conditioning signal has zero probability; such rows
    /// are left as all zeros.
    std::vector<std::size_t> undefined_rows;
    Rational coefficient;  // Dobrushin coefficient of the defined rows

    std::size_t num_rows() const noexcept { return rows.size(); }
    std::size_t num_cols() const noexcept { return rows.empty() ? 0 : rows.front().size(); }
    std::vector<std::vector<double>> values() const;
};

/// Throws std::invalid_argument when from == to, std::out_of_range for bad
/// indices.
PredictionMatrix prediction_matrix(const InfoStructure& info, std::size_t state, std::size_t from, std::size_t to);

/// Row vector times matrix. Throws std::invalid_argument on a size mismatch.
std::vector<double> predict_counterparty(std::span<const double> own, const PredictionMatrix& m);
std::vector<Rational> predict_counterparty(const std::vector<Rational>& own, const PredictionMatrix& m);

/// Maximum TV distance between rows; 0 for a single row. Throws
/// std::invalid_argument unless every row is a probability vector.
Rational dobrushin_coefficient(const std::vector<std::vector<Rational>>& rows);
inline Rational dobrushin_coefficient(const PredictionMatrix& m) { return m.coefficient; }

/// Largest coefficient over all states and ordered agent pairs.
Rational global_contraction_coefficient(const InfoStructure& info);

struct ContractionCheck {
    double lhs = 0.0;  // TV(a M, b M)
    double rhs = 0.0;  // coefficient * TV(a, b)
    bool holds = false;
};

/// Tests TV(aM, bM) <= coefficient * TV(a, b) with 1e-12 slack.
ContractionCheck verify_contraction(const PredictionMatrix& m, std::span<const double> a, std::span<const double> b);

struct TightPair {
    std::size_t row_a = 0;
    std::size_t row_b = 0;
    Rational lhs;  // TV of the image of the two vertex distributions
};

/// Pair of simplex vertices at which the contraction bound is attained
/// exactly, found by checking all vertex pairs. Empty for single-row
/// matrices.
std::vector<TightPair> tightness_vertices(const PredictionMatrix& m);

struct MarginalConsistency {
    std::size_t state = 0;
    std::size_t from = 0;
    std::size_t to = 0;
    bool exact = false;
    std::vector<Rational> deviation;  // own marginal * M - counterparty marginal
};

/// Checks own * M == counterparty exactly.
MarginalConsistency verify_marginal_consistency(const PredictionMatrix& m, const std::vector<Rational>& own,
                                                const std::vector<Rational>& counterparty);

/// Checks own marginal * M == counterparty marginal for every state and
/// ordered agent pair, in exact arithmetic.
std::vector<MarginalConsistency> verify_marginal_consistency(const InfoStructure& info);

}  // namespace commonlearn
