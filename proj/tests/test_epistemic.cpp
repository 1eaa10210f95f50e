#include "commonlearn/epistemic.hpp"
#include "commonlearn/errors.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

using namespace commonlearn;

namespace {

oracle::Counts counts_of(const CountProfile& p) {
    oracle::Counts out;
    for (const auto& c : p.agents) out.push_back(c.counts);
    return out;
}

oracle::PointSet to_points(const EpistemicModel& model, const EpistemicEvent& event) {
    oracle::PointSet out;
    for (std::size_t s = 0; s < model.num_states(); ++s)
        for (std::size_t p = 0; p < model.space().size(); ++p)
            if (event.contains(s, p) && model.law(s).in_support(p)) out.insert({s, counts_of(model.space().at(p))});
    return out;
}

EpistemicEvent random_event(const EpistemicModel& model, std::mt19937& rng, double density) {
    auto e = model.empty_event();
    std::bernoulli_distribution coin(density);
    for (std::size_t s = 0; s < model.num_states(); ++s)
        for (std::size_t p = 0; p < model.space().size(); ++p)
            if (coin(rng)) e.set(s, p);
    return e;
}

Rational exact_q(double q) { return shortest_decimal(q); }

}  // namespace

TEST(EpistemicEvent, SetAlgebra) {
    const EpistemicModel model(example1(), 4);
    std::mt19937 rng(3);
    for (int i = 0; i < 20; ++i) {
        const auto a = random_event(model, rng, 0.4), b = random_event(model, rng, 0.6);
        EXPECT_EQ(~(a & b), ~a | ~b);
        EXPECT_EQ(~(a | b), ~a & ~b);
        EXPECT_TRUE((a & b).subset_of(a));
        EXPECT_TRUE(a.subset_of(a | b));
        EXPECT_EQ((a | ~a).count(), model.full_event().count());
        EXPECT_TRUE((a & ~a).empty());
        EXPECT_EQ(~~a, a);
    }
    EXPECT_TRUE(model.full_event().full());
    const EpistemicModel other(example1(), 5);
    EXPECT_THROW(model.full_event() & other.full_event(), std::invalid_argument);
    EXPECT_EQ(std::string(to_string(EventOrigin::belief_image)), "belief-image");
}

TEST(TvBall, ExactBoundary) {
    const TvBall ball(fixtures::rationals({"3/5", "2/5"}), Rational(1, 20));
    EXPECT_TRUE(ball.contains(std::vector<int>{33, 27}));
    EXPECT_TRUE(ball.contains(std::vector<int>{39, 21}));
    EXPECT_FALSE(ball.contains(std::vector<int>{32, 28}));
    EXPECT_FALSE(ball.contains(std::vector<int>{40, 20}));
    EXPECT_FALSE(ball.contains(std::vector<int>{0, 0}));
    // A 2^41 denominator takes the big-rational path; the centre sits
    // exactly 1 / (3 * 2^41) above 1/3.
    const Rational centre = parse_rational("733007751851/2199023255552");
    const std::vector<Rational> dist{centre, 1 - centre};
    const std::vector<int> third{1000, 2000};
    EXPECT_TRUE(TvBall(dist, parse_rational("1/6597069766656")).contains(third));
    EXPECT_FALSE(TvBall(dist, parse_rational("1/6597069766657")).contains(third));
    EXPECT_FALSE(TvBall(dist, parse_rational("1/6597069766656")).contains(std::vector<int>{1001, 1999}));
}

TEST(Events, RegionExportAtSixty) {
    const auto info = example1();
    const EpistemicModel model(info, 60);
    const std::vector<std::size_t> cell{3};
    const auto ball = identified_ball_event(model, Rational(1, 20), cell);
    std::set<int> agent1, agent2;
    for (std::size_t p = 0; p < model.space().size(); ++p)
        if (ball.contains(3, p)) {
            const auto profile = model.space().at(p);
            agent1.insert(profile.agents[0].counts[0]);
            agent2.insert(profile.agents[1].counts[0]);
        }
    EXPECT_EQ(agent1, (std::set<int>{33, 34, 35, 36, 37, 38, 39}));
    EXPECT_EQ(agent2, agent1);
    EXPECT_EQ(ball.count(), 4u * 49u);

    std::ostringstream csv;
    write_event_csv(csv, model, ball, true);
    std::istringstream lines(csv.str());
    std::string header;
    std::getline(lines, header);
    EXPECT_EQ(header, "state,agent1_0,agent1_1,agent2_0,agent2_1,member");
}

TEST(Events, HorizonZeroBallIsEmpty) {
    const EpistemicModel model(example1(), 0);
    EXPECT_TRUE(empirical_ball_event(model, Rational(1, 2), 0).empty());
    const std::vector<std::size_t> all{0, 1, 2, 3};
    EXPECT_TRUE(state_event(model, all).full());
    EXPECT_THROW(state_event(model, std::vector<std::size_t>{9}), std::out_of_range);
}

TEST(Beliefs, ShortcutGivesExactZeroOrOne) {
    const EpistemicModel model(example1(), 8);
    const std::vector<std::size_t> all{0, 1, 2, 3};
    for (double b : individual_beliefs(model, 0, state_event(model, all))) EXPECT_EQ(b, 1.0);
    for (double b : individual_beliefs(model, 1, model.empty_event())) EXPECT_EQ(b, 0.0);
}

TEST(Beliefs, OperatorsMatchEnumeration) {
    std::mt19937 rng(5);
    for (const auto& info : {example1(), fixtures::ternary_pair(), fixtures::three_agents()}) {
        for (int t = 1; t <= 4; ++t) {
            const EpistemicModel model(info, t);
            const oracle::Enumeration e(info, t);
            std::vector<EpistemicEvent> events{state_event(model, std::vector<std::size_t>{0}),
                                               identified_ball_event(model, Rational(1, 4), std::vector<std::size_t>{1})};
            for (int i = 0; i < 3; ++i) events.push_back(random_event(model, rng, 0.5));
            for (const auto& event : events) {
                const auto points = to_points(model, event);
                for (double q : {0.3, 0.5, 0.8}) {
                    const auto rq = exact_q(q);
                    const auto above = oracle::Threshold::above;
                    for (std::size_t l = 0; l < info.num_agents(); ++l)
                        EXPECT_TRUE(oracle::sandwiched(oracle::belief_image(e, rq, l, points, above),
                                                       to_points(model, individual_belief_operator(model, q, l, event)),
                                                       oracle::belief_image(e, rq, l, points)));
                    EXPECT_TRUE(oracle::sandwiched(oracle::mutual_belief_image(e, rq, points, above),
                                                   to_points(model, mutual_belief_operator(model, q, event)),
                                                   oracle::mutual_belief_image(e, rq, points)));
                    EXPECT_TRUE(oracle::sandwiched(oracle::common_belief(e, rq, points, above),
                                                   to_points(model, common_belief_event(model, q, event).event),
                                                   oracle::common_belief(e, rq, points)));
                }
            }
        }
    }
}

// Away from exact ties the engine must reproduce the oracle point for point.
TEST(Beliefs, OperatorsMatchEnumerationExactlyOffTies) {
    const auto info = example1();
    for (int t = 1; t <= 4; ++t) {
        const EpistemicModel model(info, t);
        const oracle::Enumeration e(info, t);
        const auto event = identified_ball_event(model, Rational(1, 4), std::vector<std::size_t>{3});
        const auto points = to_points(model, event);
        for (double q : {0.31, 0.77}) {
            for (std::size_t l = 0; l < 2; ++l)
                EXPECT_EQ(to_points(model, individual_belief_operator(model, q, l, event)),
                          oracle::belief_image(e, exact_q(q), l, points));
            EXPECT_EQ(to_points(model, common_belief_event(model, q, event).event),
                      oracle::common_belief(e, exact_q(q), points));
        }
    }
}

TEST(Beliefs, EventProbabilityMatchesEnumeration) {
    const auto info = example1();
    const int t = 5;
    const EpistemicModel model(info, t);
    const oracle::Enumeration e(info, t);
    const auto event = identified_ball_event(model, Rational(1, 5), std::vector<std::size_t>{3});
    Rational prior_total = 0;
    for (std::size_t s = 0; s < info.num_states(); ++s) {
        Rational p = 0;
        for (const auto& [counts, w] : e.law(s))
            if (to_points(model, event).count({s, counts})) p += w;
        EXPECT_NEAR(event_probability(model, event, s), to_double(p), 1e-14);
        prior_total += info.prior(s) * p;
    }
    EXPECT_NEAR(event_probability(model, event), to_double(prior_total), 1e-14);
}

TEST(Beliefs, OperatorIsMonotoneAndSlackWidens) {
    const EpistemicModel model(example1(), 12);
    std::mt19937 rng(9);
    for (int i = 0; i < 10; ++i) {
        const auto a = random_event(model, rng, 0.3);
        const auto b = a | random_event(model, rng, 0.3);
        for (std::size_t l = 0; l < 2; ++l) {
            EXPECT_TRUE(individual_belief_operator(model, 0.6, l, a).subset_of(individual_belief_operator(model, 0.6, l, b)));
            EXPECT_TRUE(individual_belief_operator(model, 0.7, l, a).subset_of(individual_belief_operator(model, 0.6, l, a)));
            EXPECT_TRUE(individual_belief_operator(model, 0.6, l, a).subset_of(
                individual_belief_operator(model, 0.6, l, a, 0.05)));
        }
    }
    EXPECT_THROW(individual_belief_operator(model, 1.5, 0, model.full_event()), std::invalid_argument);
}

TEST(CommonBelief, FullEventTakesOneIteration) {
    const EpistemicModel model(example1(), 6);
    const auto r = common_belief_event(model, 0.9, model.full_event());
    EXPECT_TRUE(r.event.full());
    EXPECT_EQ(r.iterations, 1);
    const auto none = common_belief_event(model, 0.9, model.empty_event());
    EXPECT_TRUE(none.event.empty());
}

TEST(CommonBelief, RulesAgreeOnEvidentEvents) {
    const EpistemicModel model(example1(), 40);
    const std::vector<std::size_t> cell{0, 1, 2};
    const auto event = state_event(model, cell);
    const auto a = common_belief_event(model, 0.6, event, CommonBeliefRule::iterate_then_intersect);
    const auto b = common_belief_event(model, 0.6, event, CommonBeliefRule::believe_intersection);
    EXPECT_TRUE(a.event.subset_of(mutual_belief_operator(model, 0.6, event)));
    EXPECT_TRUE(b.event.subset_of(mutual_belief_operator(model, 0.6, event)));
}

TEST(CommonBelief, NonCellEventIsNeverBelievedByAgentOne) {
    // Agent 1 cannot tell theta1 from theta2 and the prior is uniform, so its
    // posterior on theta1 never exceeds 1/2.
    const auto info = example1();
    for (int t : {1, 25, 150}) {
        const EpistemicModel model(info, t);
        const auto event = state_event(model, std::vector<std::size_t>{0});
        for (double q : {0.5000001, 0.6, 0.99}) {
            EXPECT_EQ(event_probability(model, individual_belief_operator(model, q, 0, event), 0), 0.0);
            EXPECT_EQ(event_probability(model, common_belief_event(model, q, event).event, 0), 0.0);
        }
    }
}

TEST(Evidence, WitnessesAreCappedAndCounted) {
    const EpistemicModel model(example1(), 30);
    const auto ball = identified_ball_event(model, Rational(1, 20), std::vector<std::size_t>{3});
    const auto report = is_q_evident(model, 0.9, ball, 3);
    EXPECT_FALSE(report.is_evident);
    EXPECT_EQ(report.witnesses.size(), 3u);
    EXPECT_GE(report.violations, 3u);
    for (const auto& w : report.witnesses) {
        EXPECT_TRUE(ball.contains(w.state, w.profile));
        EXPECT_LT(*std::min_element(w.beliefs.begin(), w.beliefs.end()), 0.9);
    }
    EXPECT_TRUE(is_q_evident(model, 0.9, model.full_event()).is_evident);
    EXPECT_TRUE(is_q_evident(model, 0.9, model.empty_event()).is_evident);
}

TEST(BallProbability, BinaryPathMatchesOracleAndModel) {
    const auto info = example1();
    const std::vector<std::vector<std::size_t>> cells{{3}, {0, 1, 2}, {1}};
    for (int t : {0, 1, 7, 50, 120}) {
        const EpistemicModel model(info, t);
        for (const auto& cell : cells)
            for (const Rational& r : {Rational(1, 20), Rational(1, 3)})
                for (std::size_t s = 0; s < info.num_states(); ++s) {
                    const double fast = ball_probability(info, s, t, r, cell);
                    const double slow = event_probability(model, identified_ball_event(model, r, cell), s);
                    EXPECT_NEAR(fast, slow, 1e-12) << "t=" << t << " state " << s;
                    EXPECT_NEAR(fast, static_cast<double>(oracle::pair_ball(info, s, t, r, cell)), 1e-12);
                }
    }
}

TEST(BallProbability, FarHorizonMatchesOracle) {
    const auto info = example1();
    const std::vector<std::size_t> cell{3};
    for (int t : {1000, 2500}) {
        const double fast = ball_probability(info, 3, t, Rational(1, 50), cell);
        EXPECT_NEAR(fast, static_cast<double>(oracle::pair_ball(info, 3, t, Rational(1, 50), cell)), 1e-10);
    }
}

TEST(BallProbability, GenericShapesUseTheModel) {
    const auto info = fixtures::ternary_pair();
    const std::vector<std::size_t> cell{1};
    const oracle::Enumeration e(info, 4);
    const EpistemicModel model(info, 4);
    const auto ball = identified_ball_event(model, Rational(1, 4), cell);
    Rational want = 0;
    for (const auto& [counts, p] : e.law(1))
        if (to_points(model, ball).count({1, counts})) want += p;
    EXPECT_NEAR(ball_probability(info, 1, 4, Rational(1, 4), cell), to_double(want), 1e-14);
    EXPECT_THROW(ball_probability(fixtures::three_agents(), 0, 500, Rational(1, 4), cell), CapacityError);
}
