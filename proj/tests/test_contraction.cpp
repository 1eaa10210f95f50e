#include "commonlearn/belief_engine.hpp"
#include "commonlearn/contraction.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace commonlearn;

TEST(PredictionMatrix, Example1Goldens) {
    const auto info = example1();
    const std::vector<Rational> want{Rational(1, 2), Rational(1, 3), Rational(3, 8), Rational(1, 6)};
    for (std::size_t s = 0; s < 4; ++s) EXPECT_EQ(prediction_matrix(info, s, 0, 1).coefficient, want[s]);
    EXPECT_EQ(global_contraction_coefficient(info), Rational(1, 2));
    const auto m = prediction_matrix(info, 1, 0, 1);
    EXPECT_EQ(m.rows[0], fixtures::rationals({"5/6", "1/6"}));
    EXPECT_EQ(m.rows[1], fixtures::rationals({"1/2", "1/2"}));
}

TEST(PredictionMatrix, MatchesRowTvOracle) {
    for (const auto& info : {example1(), fixtures::ternary_pair(), fixtures::three_agents()})
        for (std::size_t s = 0; s < info.num_states(); ++s)
            for (std::size_t a = 0; a < info.num_agents(); ++a)
                for (std::size_t b = 0; b < info.num_agents(); ++b) {
                    if (a == b) {
                        EXPECT_THROW(prediction_matrix(info, s, a, b), std::invalid_argument);
                        continue;
                    }
                    const auto m = prediction_matrix(info, s, a, b);
                    const auto rows = oracle::prediction_rows(info, s, a, b);
                    EXPECT_EQ(m.rows, rows);
                    EXPECT_EQ(m.coefficient, oracle::row_tv(rows));
                }
}

TEST(PredictionMatrix, NuCalculations) {
    const auto info = example1();
    const auto m1 = prediction_matrix(info, 0, 0, 1);
    const auto m2 = prediction_matrix(info, 1, 0, 1);
    for (double nu : {0.0, 0.01, 0.05}) {
        const std::vector<double> own{0.5 + nu, 0.5 - nu};
        const auto p1 = predict_counterparty(own, m1);
        const auto p2 = predict_counterparty(own, m2);
        EXPECT_NEAR(p1[0], (1 + nu) / 2, 1e-12);
        EXPECT_NEAR(p1[1], (1 - nu) / 2, 1e-12);
        EXPECT_NEAR(p2[0], (2 + nu) / 3, 1e-12);
        EXPECT_NEAR(p2[1], (1 - nu) / 3, 1e-12);
    }
    EXPECT_THROW(predict_counterparty(std::vector<double>{1.0}, m1), std::invalid_argument);
}

TEST(PredictionMatrix, MarginalConsistencyIsExact) {
    for (const auto& info : {example1(), fixtures::ternary_pair(), fixtures::three_agents()}) {
        const auto checks = verify_marginal_consistency(info);
        EXPECT_EQ(checks.size(), info.num_states() * info.num_agents() * (info.num_agents() - 1));
        for (const auto& c : checks) {
            EXPECT_TRUE(c.exact);
            for (const auto& d : c.deviation) EXPECT_EQ(d, 0);
        }
    }
    const auto info = example1();
    const auto m = prediction_matrix(info, 0, 0, 1);
    const auto bad = verify_marginal_consistency(m, fixtures::rationals({"2/3", "1/3"}), info.marginal(0, 1));
    EXPECT_FALSE(bad.exact);
    EXPECT_EQ(bad.deviation[0], Rational(1, 12));
}

TEST(PredictionMatrix, UndefinedRowsForImpossibleSignals) {
    const InfoStructure info(fixtures::data({"a"}, {"1"}, {3, 2}, {{"1/4", "1/4", "0", "0", "1/4", "1/4"}}));
    const auto m = prediction_matrix(info, 0, 0, 1);
    EXPECT_EQ(m.undefined_rows, (std::vector<std::size_t>{1}));
    EXPECT_EQ(m.rows[1], fixtures::rationals({"0", "0"}));
    EXPECT_EQ(m.coefficient, 0);
}

TEST(Dobrushin, InputChecks) {
    EXPECT_EQ(dobrushin_coefficient({fixtures::rationals({"1/3", "2/3"})}), 0);
    EXPECT_EQ(dobrushin_coefficient({fixtures::rationals({"1", "0"}), fixtures::rationals({"0", "1"})}), 1);
    EXPECT_THROW(dobrushin_coefficient({fixtures::rationals({"1/2", "1/3"})}), std::invalid_argument);
    EXPECT_THROW(dobrushin_coefficient({fixtures::rationals({"3/2", "-1/2"})}), std::invalid_argument);
    EXPECT_THROW(dobrushin_coefficient({fixtures::rationals({"1"}), fixtures::rationals({"1/2", "1/2"})}),
                 std::invalid_argument);
}

TEST(Dobrushin, ContractionHoldsOnRandomPairs) {
    std::mt19937_64 rng(17);
    for (const auto& info : {example1(), fixtures::ternary_pair()})
        for (std::size_t s = 0; s < info.num_states(); ++s)
            for (std::size_t a = 0; a < 2; ++a) {
                const auto m = prediction_matrix(info, s, a, 1 - a);
                std::gamma_distribution<double> g(0.5);
                const auto draw = [&] {
                    std::vector<double> v(m.num_rows());
                    double sum = 0;
                    for (auto& x : v) sum += x = g(rng);
                    for (auto& x : v) x /= sum;
                    return v;
                };
                for (int i = 0; i < 2000; ++i) {
                    const auto c = verify_contraction(m, draw(), draw());
                    EXPECT_TRUE(c.holds) << c.lhs << " > " << c.rhs;
                    EXPECT_GE(c.rhs - c.lhs, -1e-12);
                }
            }
}

TEST(Dobrushin, TightVerticesAttainTheCoefficient) {
    const auto info = example1();
    for (std::size_t s = 0; s < 4; ++s) {
        const auto m = prediction_matrix(info, s, 0, 1);
        const auto tight = tightness_vertices(m);
        ASSERT_FALSE(tight.empty());
        for (const auto& v : tight) {
            EXPECT_EQ(v.lhs, m.coefficient);
            EXPECT_NE(v.row_a, v.row_b);
        }
    }
}
