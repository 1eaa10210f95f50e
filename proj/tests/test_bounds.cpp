#include "commonlearn/belief_engine.hpp"
#include "commonlearn/bounds.hpp"
#include "commonlearn/epistemic.hpp"
#include "commonlearn/errors.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace commonlearn;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

// Minimum KL from `center` over grid points strictly outside the TV ball.
double sanov_grid(const std::vector<double>& center, double radius, int n) {
    double best = kInf;
    for (int i = 0; i <= n; ++i)
        for (int j = 0; i + j <= n; ++j) {
            const std::vector<double> phi{double(i) / n, double(j) / n, double(n - i - j) / n};
            double tv = 0;
            for (std::size_t x = 0; x < 3; ++x) tv += std::abs(phi[x] - center[x]);
            if (tv / 2 <= radius) continue;
            best = std::min(best, kl_divergence(phi, center));
        }
    return best;
}

}  // namespace

TEST(KlGap, MatchesVertexOracle) {
    const auto info = example1();
    for (double r : {0.0, 0.005, 0.01, 0.02, 0.03, 0.05, 0.2}) {
        const auto gap = global_kl_gap(info, r);
        EXPECT_NEAR(gap.value, oracle::binary_gap_vertices(info, r), 1e-14) << "radius " << r;
    }
    EXPECT_GT(global_kl_gap(info, 0.02).value, 0.0);
    EXPECT_LT(global_kl_gap(info, 0.05).value, 0.0);
}

TEST(KlGap, GridOracleOnTernaryAlphabet) {
    const auto info = fixtures::ternary_pair();
    for (double r : {0.0, 0.02, 0.05}) {
        const double exact = global_kl_gap(info, r).value;
        const double grid = oracle::gap_grid(info, r, 600);
        EXPECT_LE(exact, grid + 1e-12);
        EXPECT_NEAR(exact, grid, 2e-3);
    }
}

TEST(KlGap, ArgmaxLiesInTheBall) {
    const auto info = example1();
    const auto g = kl_gap(info, 0, 2, 0.02);
    ASSERT_TRUE(g.rival.has_value());
    EXPECT_NEAR(g.argmax[0] + g.argmax[1], 1.0, 1e-15);
    EXPECT_LE(tv_distance(g.argmax, info.marginal_values(2, 0)), 0.02 + 1e-15);
    double v = 0;
    for (std::size_t x = 0; x < 2; ++x)
        v += g.argmax[x] * std::log(info.marginal_values(*g.rival, 0)[x] / info.marginal_values(2, 0)[x]);
    EXPECT_NEAR(-v, g.value, 1e-14);
}

TEST(KlGap, NoRivalsMeansInfiniteGap) {
    const InfoStructure same(fixtures::data({"a", "b"}, {"1/2", "1/2"}, {2, 2},
                                            {{"1/4", "1/4", "1/4", "1/4"}, {"1/4", "1/4", "1/4", "1/4"}}));
    EXPECT_EQ(global_kl_gap(same, 0.1).value, kInf);
    EXPECT_TRUE(max_epsilon(same).degenerate);
    EXPECT_THROW(kl_gap(same, 0, 0, -0.1), std::invalid_argument);
}

TEST(MaxEpsilon, BracketsTheSignChange) {
    const auto info = example1();
    const auto est = max_epsilon(info);
    EXPECT_FALSE(est.degenerate);
    EXPECT_GT(oracle::binary_gap_vertices(info, est.value), 0.0);
    EXPECT_LE(oracle::binary_gap_vertices(info, est.value + 2e-6), 0.0);
}

TEST(Sanov, BinaryExponentIsTheNearerEdge) {
    const auto info = example1();
    for (double r : {0.05, 0.1, 0.2}) {
        const double p = 0.5;
        EXPECT_NEAR(sanov_exponent(info, 0, 0, r), binary_kl(p + r, p), 1e-15);
        const double q = 2.0 / 3.0;
        EXPECT_NEAR(sanov_exponent(info, 0, 2, r), std::min(binary_kl(q + r, q), binary_kl(q - r, q)), 1e-15);
    }
    EXPECT_EQ(sanov_exponent(info, 0, 0, 0.5), kInf);
}

TEST(Sanov, TernaryExponentMatchesGrid) {
    const auto info = fixtures::ternary_pair();
    for (std::size_t s = 0; s < 2; ++s)
        for (double r : {0.05, 0.15}) {
            const double exact = sanov_exponent(info, 0, s, r);
            const double grid = sanov_grid(info.marginal_values(s, 0), r, 600);
            EXPECT_LE(exact, grid + 1e-12);
            EXPECT_NEAR(exact, grid, 1e-3);
        }
}

TEST(Sanov, SandwichHoldsForBinomialBall) {
    const auto info = example1();
    for (const char* r : {"1/20", "1/10", "1/5"}) {
        const Rational radius = parse_rational(r);
        for (int t : {1, 2, 10, 57, 200}) {
            const auto b = sanov_bounds(info, 0, 0, to_double(radius), t);
            const double exact = to_double(oracle::binomial_ball(Rational(1, 2), t, radius));
            EXPECT_LE(b.lower, exact + 1e-12) << "t=" << t;
            EXPECT_GE(b.upper, exact - 1e-12) << "t=" << t;
        }
    }
    EXPECT_THROW(sanov_bounds(info, 0, 0, 0.1, 0), std::invalid_argument);
}

TEST(PosteriorFloor, HoldsOnTheBall) {
    const auto info = example1();
    const double r = 0.02;
    const double b = oracle::binary_gap_vertices(info, r);
    ASSERT_GT(b, 0.0);
    const auto cells0 = identification_partition(info, 0);
    for (int t : {100, 400}) {
        for (std::size_t s = 0; s < 4; ++s) {
            const double floor = posterior_floor(info, s, r, t);
            EXPECT_NEAR(floor, std::max(0.0, 1.0 - std::exp(-t * b) / 0.25), 1e-12);
            EXPECT_NEAR(log_floor_complement(info, s, r, t), -t * b + std::log(4.0), 1e-9);
            const TvBall ball(info.marginal(s, 0), shortest_decimal(r));
            for (int a = 0; a <= t; ++a) {
                const CountVector c{{a, t - a}};
                if (!ball.contains(c.counts)) continue;
                EXPECT_GE(posterior_set(info, 0, c, cells0.cell_containing(s)), floor - 1e-12);
            }
        }
    }
    EXPECT_THROW(posterior_floor(info, 0, 0.05, 10), std::domain_error);
}

TEST(Beta, ClosedFormForAnyAgentCount) {
    for (std::size_t n : {1u, 2u, 3u, 5u})
        for (double q : {0.5, 0.8, 0.9, 0.99})
            EXPECT_NEAR(beta_for(q, n), oracle::beta_closed_form(q, n), 1e-9) << n << " agents, q=" << q;
    EXPECT_NEAR(beta_for(0.9, 2), 0.3293, 1e-4);
    EXPECT_THROW(beta_for(1.0, 2), std::invalid_argument);
    EXPECT_THROW(beta_for(0.5, 0), std::invalid_argument);
}

TEST(TimeThreshold, SmallInstanceCertificates) {
    const auto info = example1();
    ThresholdOptions options;
    options.max_horizon = 4000;
    const double q = 0.6, radius = 0.02;
    const double beta = 0.5 * beta_for(q, 2);
    const auto th = time_threshold(info, q, beta, radius, options);
    EXPECT_EQ(th.threshold, std::max(th.search_time, th.log_time));
    EXPECT_NEAR(th.q_beta, std::pow(q, beta), 1e-15);
    for (std::size_t s = 0; s < 4; ++s) EXPECT_GE(1.0 - std::exp(-th.threshold * th.gap) / 0.25, th.q_beta - 1e-12);
    EXPECT_EQ(th.certificates.size(), 4u);
    for (const auto& c : th.certificates) EXPECT_GT(c.probability, th.q_beta);
    // The run is the first one: the horizon before it fails somewhere.
    if (th.search_time > 1) {
        bool failed = false;
        const auto cells = common_identification(info);
        for (const auto& cell : cells.cells())
            for (std::size_t s : cell)
                failed = failed || !(ball_probability(info, s, th.search_time - 1, Rational(1, 50), cell) > th.q_beta);
        EXPECT_TRUE(failed);
    }
}

TEST(TimeThreshold, Errors) {
    const auto info = example1();
    EXPECT_THROW(time_threshold(info, 0.8, 0.1, 0.05), std::domain_error);
    EXPECT_THROW(time_threshold(info, 0.8, 0.9, 0.02), std::invalid_argument);
    ThresholdOptions tiny;
    tiny.max_horizon = 50;
    EXPECT_THROW(time_threshold(info, 0.8, 0.1, 0.02, tiny), CapacityError);
}

TEST(BoundSet, DefaultsToHalfTheSupremum) {
    const auto info = example1();
    ThresholdOptions options;
    options.max_horizon = 100;
    // Radius beyond the admissible one: no threshold is attempted.
    const auto set = compute_bounds(info, 0.8, 0.05, std::nullopt, options);
    EXPECT_NEAR(set.beta, 0.5 * set.beta_star, 1e-15);
    EXPECT_FALSE(set.threshold.has_value());
    EXPECT_EQ(set.exponents.size(), 8u);
    EXPECT_EQ(set.contraction, Rational(1, 2));
}
