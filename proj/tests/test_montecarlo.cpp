#include "commonlearn/contraction.hpp"
#include "commonlearn/epistemic.hpp"
#include "commonlearn/montecarlo.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>

using namespace commonlearn;

namespace {

class ThreadCap {
public:
    explicit ThreadCap(const char* value) {
        if (const char* old = std::getenv("COMMON_LEARNING_THREADS")) saved_ = old;
        ::setenv("COMMON_LEARNING_THREADS", value, 1);
    }
    ~ThreadCap() {
        if (saved_.empty())
            ::unsetenv("COMMON_LEARNING_THREADS");
        else
            ::setenv("COMMON_LEARNING_THREADS", saved_.c_str(), 1);
    }

private:
    std::string saved_;
};

}  // namespace

TEST(PathRng, StreamsAreKeyedBySeedAndPath) {
    PathRng a(1, 7), b(1, 7), c(1, 8), d(2, 7);
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    EXPECT_NE(x, c.next());
    EXPECT_NE(x, d.next());
    PathRng u(0, 0);
    double sum = 0;
    for (int i = 0; i < 100000; ++i) {
        const double v = u.uniform();
        ASSERT_GE(v, 0.0);
        ASSERT_LT(v, 1.0);
        sum += v;
    }
    EXPECT_NEAR(sum / 100000, 0.5, 0.005);
}

TEST(Sampler, WorkerCountDoesNotChangeResults) {
    const auto info = example1();
    const SimulationPlan plan{3, 40, 5000, 99};
    std::vector<CountProfile> one, many;
    {
        ThreadCap cap("1");
        EXPECT_EQ(worker_count(), 1u);
        one = sample_paths(info, plan);
    }
    {
        ThreadCap cap("4");
        many = sample_paths(info, plan);
    }
    EXPECT_EQ(one, many);
    EXPECT_EQ(one[17], sample_path(info, plan, 17));
    for (const auto& p : one) EXPECT_EQ(p.horizon(), 40);
}

TEST(Sampler, SingleDrawFollowsTheJointLaw) {
    const auto info = fixtures::three_agents();
    const SimulationPlan plan{1, 1, 200000, 5};
    const auto paths = sample_paths(info, plan);
    std::vector<double> freq(8, 0.0);
    for (const auto& p : paths) {
        const std::size_t flat = static_cast<std::size_t>(p.agents[0].counts[1] * 4 + p.agents[1].counts[1] * 2 +
                                                          p.agents[2].counts[1]);
        freq[flat] += 1.0 / static_cast<double>(plan.paths);
    }
    for (std::size_t f = 0; f < 8; ++f) {
        const double p = info.joint_values(1)[f];
        EXPECT_NEAR(freq[f], p, 4 * std::sqrt(p * (1 - p) / static_cast<double>(plan.paths)));
    }
}

TEST(Estimate, StandardErrorAndHalfWidth) {
    const auto e = Estimate::from_hits(250, 1000);
    EXPECT_DOUBLE_EQ(e.mean, 0.25);
    EXPECT_DOUBLE_EQ(e.standard_error, std::sqrt(0.25 * 0.75 / 1000));
    EXPECT_DOUBLE_EQ(e.half_width, 3 * e.standard_error);
    EXPECT_EQ(Estimate::from_hits(0, 10).standard_error, 0.0);
}

TEST(Estimate, AgreesWithExactBallProbability) {
    const auto info = example1();
    const std::vector<std::size_t> cell{3};
    const Rational radius(1, 20);
    for (int t : {50, 100}) {
        const double exact = ball_probability(info, 3, t, radius, cell);
        const auto e = estimate_event(info, {3, t, 40000, 11}, ball_predicate(info, radius, cell));
        EXPECT_NEAR(e.mean, exact, 4 * std::sqrt(exact * (1 - exact) / 40000));
    }
}

TEST(Estimate, EventFormChecksHorizon) {
    const auto info = example1();
    const EpistemicModel model(info, 10);
    const auto ball = identified_ball_event(model, Rational(1, 10), std::vector<std::size_t>{3});
    const auto e = estimate_event(info, {3, 10, 20000, 1}, ball);
    const double exact = event_probability(model, ball, 3);
    EXPECT_NEAR(e.mean, exact, 4 * std::sqrt(exact * (1 - exact) / 20000));
    EXPECT_THROW(estimate_event(info, {3, 11, 10, 1}, ball), std::invalid_argument);
}

TEST(ConditionalPrediction, MatchesEnumeration) {
    const auto info = example1();
    const int t = 6;
    const Rational radius(1, 4);
    const oracle::Enumeration e(info, t);
    const auto rows = oracle::prediction_rows(info, 1, 0, 1);
    const Rational bound = 2 * t * (1 - oracle::row_tv(oracle::prediction_rows(info, 0, 0, 1))) * radius;
    Rational want = 0;
    for (const auto& [counts, p] : e.law(1)) {
        Rational dist = 0;
        for (std::size_t y = 0; y < 2; ++y) {
            Rational cell = -counts[1][y];
            for (std::size_t x = 0; x < 2; ++x) cell += counts[0][x] * rows[x][y];
            dist += abs(cell);
        }
        if (dist <= bound) want += p;
    }
    const std::size_t n = 60000;
    const auto r = verify_conditional_prediction(info, 1, 0, 1, t, radius, n, 3);
    EXPECT_EQ(r.threshold, Rational(1, 8));
    const double p = to_double(want);
    EXPECT_NEAR(r.overall.mean, p, 4 * std::sqrt(p * (1 - p) / n));
    std::size_t total = 0;
    for (const auto& b : r.bins) total += b.n;
    EXPECT_EQ(total, n);
    EXPECT_EQ(r.bins_used + r.bins_sparse, r.bins.size());
}

TEST(Curve, ExactRowsMatchEngines) {
    const auto info = example1();
    const std::vector<std::size_t> cell{3};
    const std::vector<int> grid{20, 60};
    const auto rows = convergence_curve(info, 3, 0.7, Rational(1, 20), cell, grid);
    ASSERT_EQ(rows.size(), 2u);
    for (const auto& r : rows) {
        EXPECT_NEAR(r.ball, ball_probability(info, 3, r.horizon, Rational(1, 20), cell), 1e-14);
        const EpistemicModel model(info, r.horizon);
        const auto target = state_event(model, cell);
        EXPECT_NEAR(*r.mutual, event_probability(model, mutual_belief_operator(model, 0.7, target), 3), 1e-14);
        const auto c = common_belief_event(model, 0.7, target);
        EXPECT_NEAR(*r.common, event_probability(model, c.event, 3), 1e-14);
        EXPECT_EQ(*r.common_iterations, c.iterations);
        EXPECT_LE(*r.common, *r.mutual + 1e-15);
    }
    CurveOptions mc;
    mc.mode = CurveMode::montecarlo;
    mc.paths = 20000;
    const auto sim = convergence_curve(info, 3, 0.7, Rational(1, 20), cell, grid, mc);
    for (std::size_t i = 0; i < 2; ++i) {
        ASSERT_TRUE(sim[i].ball_standard_error.has_value());
        EXPECT_NEAR(sim[i].ball, rows[i].ball, 4 * std::sqrt(rows[i].ball * (1 - rows[i].ball) / 20000));
        EXPECT_FALSE(sim[i].common.has_value());
    }
}
