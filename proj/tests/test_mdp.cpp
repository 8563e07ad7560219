#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "activeirl/gridworlds.hpp"
#include "activeirl/mdp.hpp"
#include "test_support.hpp"

using namespace airl;
using airl::testing::tabular_mdp;
using airl::testing::two_state_chain;

TEST(GridMdp, TransitionRowsSumToOne) {
    const auto env = make_structured_gridworld(0);
    for (int s = 0; s < env.mdp.num_states; ++s)
        for (int a = 0; a < env.mdp.num_actions; ++a) {
            double tot = 0.0;
            for (const auto& n : env.mdp.successors(s, a)) tot += n.prob;
            EXPECT_DOUBLE_EQ(tot, 1.0);
        }
}

TEST(GridMdp, EdgeMovesStayPut) {
    const auto m = make_grid_mdp(3, 3, std::vector<std::uint8_t>(9, 0), std::vector<std::uint8_t>(9, 0));
    Rng rng(1);
    EXPECT_EQ(m.step(0, kUp, rng), 0);
    EXPECT_EQ(m.step(0, kLeft, rng), 0);
    EXPECT_EQ(m.step(0, kRight, rng), 1);
    EXPECT_EQ(m.step(0, kDown, rng), 3);
    EXPECT_EQ(m.step(8, kDown, rng), 8);
    EXPECT_EQ(m.step(8, kRight, rng), 8);
    EXPECT_EQ(m.step(4, kStay, rng), 4);
}

TEST(GridMdp, JailAbsorbsEveryAction) {
    const auto env = make_structured_gridworld(0);
    int jail = -1;
    for (int s = 0; s < env.mdp.num_states; ++s)
        if (env.mdp.is_jail(s)) jail = s;
    ASSERT_GE(jail, 0);
    for (int a = 0; a < kGridActions; ++a) {
        ASSERT_EQ(env.mdp.successors(jail, a).size(), 1u);
        EXPECT_EQ(env.mdp.successors(jail, a)[0].state, jail);
        EXPECT_EQ(env.mdp.successors(jail, a)[0].prob, 1.0);
    }
}

TEST(GridMdp, ValidateRejectsBadRows) {
    auto m = two_state_chain();
    m.successors(0, 0)[0].prob = 0.5;
    EXPECT_THROW(m.validate(), InputError);
}

TEST(ValueIteration, AbsorbingStateGeometricSeries) {
    const auto m = tabular_mdp(1, {{{{0, 1.0}}}}, {0}, 0.5);
    const std::vector<double> r{-1.0};
    const auto q = value_iteration(m, r, 1e-10);
    EXPECT_NEAR(q.value(0), -2.0, 1e-8);
}

TEST(ValueIteration, TerminalValueIsItsReward) {
    const auto m = two_state_chain();
    const std::vector<double> r{-1.0, 100.0};
    const auto q = value_iteration(m, r);
    EXPECT_DOUBLE_EQ(q.value(1), 100.0);
}

TEST(ValueIteration, TwoStateChainOneStep) {
    const auto m = two_state_chain(0.9);
    const std::vector<double> r{-1.0, 100.0};
    const auto q = value_iteration(m, r, 1e-10);
    EXPECT_NEAR(q(0, 0), 89.0, 1e-9);
    EXPECT_NEAR(q(0, 1), -1.0 + 0.9 * 89.0, 1e-8);
}

TEST(ValueIteration, RejectsNonFiniteRewardsAndBadTolerance) {
    const auto m = two_state_chain();
    EXPECT_THROW(value_iteration(m, std::vector<double>{NAN, 1.0}), InputError);
    EXPECT_THROW(value_iteration(m, std::vector<double>{0.0, 1.0}, 0.0), InputError);
}

TEST(ValueIteration, BellmanResidualBelowTenTol) {
    Rng rng(7);
    for (double tol : {1e-4, 1e-6, 1e-8}) {
        for (int trial = 0; trial < 10; ++trial) {
            const auto m = airl::testing::random_mdp(6, 3, rng, 0.95);
            std::vector<double> r(6);
            for (auto& x : r) x = std::normal_distribution<double>(0.0, 5.0)(rng);
            const auto q = value_iteration(m, r, tol);
            EXPECT_LT(bellman_residual(m, r, q), 10.0 * tol);
        }
    }
    const auto env = make_structured_gridworld(3);
    const auto r = env.true_rewards();
    EXPECT_LT(bellman_residual(env.mdp, r, value_iteration(env.mdp, r, 1e-6)), 1e-5);
}

TEST(ValueIteration, MonotoneInEachReward) {
    Rng rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        const auto m = airl::testing::random_mdp(5, 3, rng);
        std::vector<double> r(5);
        for (auto& x : r) x = std::normal_distribution<double>(0.0, 3.0)(rng);
        const auto v0 = value_iteration(m, r, 1e-10);
        auto r2 = r;
        r2[uniform_index(rng, 5)] += 2.0 * uniform01(rng);
        const auto v1 = value_iteration(m, r2, 1e-10);
        for (int s = 0; s < 5; ++s) EXPECT_GE(v1.value(s), v0.value(s) - 1e-8);
    }
}

TEST(ValueIteration, WarmStartGivesSameFixedPoint) {
    const auto env = make_structured_gridworld(1);
    const auto r = env.true_rewards();
    const auto cold = value_iteration(env.mdp, r, 1e-9);
    const auto other = value_iteration(env.mdp, make_structured_gridworld(2).true_rewards(), 1e-9);
    const auto warm = value_iteration(env.mdp, r, 1e-9, &other);
    for (std::size_t i = 0; i < cold.q.size(); ++i) EXPECT_NEAR(cold.q[i], warm.q[i], 1e-6);
}

TEST(Boltzmann, EqualQGivesUniform) {
    QFunction q{1, 5, std::vector<double>(5, 3.7)};
    for (double beta : {0.0, 1.0, 25.0}) {
        const auto pi = boltzmann_policy(q, beta);
        for (int a = 0; a < 5; ++a) EXPECT_NEAR(pi.p(0, a), 0.2, 1e-15);
    }
}

TEST(Boltzmann, BetaZeroIsUniform) {
    QFunction q{1, 5, {1.0, -40.0, 3.0, 1e3, 0.0}};
    const auto pi = boltzmann_policy(q, 0.0);
    for (int a = 0; a < 5; ++a) EXPECT_NEAR(pi.p(0, a), 0.2, 1e-15);
}

TEST(Boltzmann, TwoActionSubstitution) {
    QFunction q{1, 2, {std::log(2.0), 0.0}};
    const auto pi = boltzmann_policy(q, 1.0);
    EXPECT_NEAR(pi.p(0, 0), 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(pi.p(0, 1), 1.0 / 3.0, 1e-15);
}

TEST(Boltzmann, PositiveAndNormalized) {
    Rng rng(5);
    QFunction q{20, 5, std::vector<double>(100)};
    for (auto& x : q.q) x = std::normal_distribution<double>(0.0, 3.0)(rng);
    for (double beta : {0.1, 1.0, 10.0}) {
        const auto pi = boltzmann_policy(q, beta);
        for (int s = 0; s < 20; ++s) {
            double tot = 0.0;
            for (int a = 0; a < 5; ++a) {
                EXPECT_GT(pi.p(s, a), 0.0);
                tot += pi.p(s, a);
            }
            EXPECT_NEAR(tot, 1.0, 1e-12);
        }
    }
}

TEST(Boltzmann, ShiftInvariant) {
    QFunction q{3, 5, {1, 2, 3, 4, 5, -1, 0, 7, 7, 2, 0.5, 0.25, 0, -3, 9}};
    auto shifted = q;
    for (int s = 0; s < 3; ++s)
        for (int a = 0; a < 5; ++a) shifted(s, a) += 1000.0 * (s + 1);
    const auto p1 = boltzmann_policy(q, 1.3), p2 = boltzmann_policy(shifted, 1.3);
    for (std::size_t i = 0; i < p1.prob.size(); ++i) EXPECT_NEAR(p1.prob[i], p2.prob[i], 1e-12);
}

TEST(Boltzmann, ExtremeQDoesNotOverflow) {
    QFunction q{1, 3, {1e300, -1e300, 0.0}};
    const auto pi = boltzmann_policy(q, 1.0);
    EXPECT_DOUBLE_EQ(pi.p(0, 0), 1.0);
    EXPECT_TRUE(std::isfinite(pi.logp(0, 0)));
}

TEST(Trajectory, JailDeterministicPolicyFillsCap) {
    const auto env = make_structured_gridworld(0);
    int jail = -1;
    for (int s = 0; s < env.mdp.num_states; ++s)
        if (env.mdp.is_jail(s)) jail = s;
    const auto pi = Policy::deterministic(kGridActions, std::vector<int>(env.mdp.num_states, kUp));
    Rng rng(1);
    const auto t = sample_trajectory(env.mdp, pi, jail, 15, rng);
    EXPECT_EQ(t.size(), 15u);
    EXPECT_FALSE(t.terminated);
    for (const auto& st : t.steps) EXPECT_EQ(st.state, jail);
}

TEST(Trajectory, StepIntoGoalTerminates) {
    const auto m = two_state_chain();
    const auto pi = Policy::deterministic(2, std::vector<int>{0, 0});
    Rng rng(1);
    const auto t = sample_trajectory(m, pi, 0, 15, rng);
    EXPECT_EQ(t.size(), 1u);
    EXPECT_TRUE(t.terminated);
}

TEST(Trajectory, ReproducibleUnderSeed) {
    const auto env = make_structured_gridworld(0);
    const auto pi = Policy::uniform(env.mdp.num_states, kGridActions);
    Rng a(42), b(42);
    EXPECT_EQ(sample_trajectory(env.mdp, pi, 0, 15, a), sample_trajectory(env.mdp, pi, 0, 15, b));
}

TEST(Trajectory, SuccessorsHavePositiveProbability) {
    Rng rng(3);
    const auto m = airl::testing::random_mdp(5, 3, rng);
    const auto pi = Policy::uniform(5, 3);
    for (int trial = 0; trial < 100; ++trial) {
        const auto t = sample_trajectory(m, pi, 0, 10, rng);
        for (std::size_t i = 0; i + 1 < t.size(); ++i) {
            double p = 0.0;
            for (const auto& n : m.successors(t.steps[i].state, t.steps[i].action))
                if (n.state == t.steps[i + 1].state) p += n.prob;
            EXPECT_GT(p, 0.0);
        }
    }
}

TEST(Trajectory, RejectsTerminalStart) {
    const auto m = two_state_chain();
    Rng rng(0);
    EXPECT_THROW(sample_trajectory(m, Policy::uniform(2, 2), 1, 5, rng), InputError);
}

TEST(LogLikelihood, MatchingDeterministicPolicyIsZero) {
    Trajectory t{0, {{0, 2}, {1, 3}, {2, 2}}, false};
    const auto pi = Policy::deterministic(5, std::vector<int>{2, 3, 2});
    EXPECT_EQ(trajectory_log_likelihood(t, pi), 0.0);
}

TEST(LogLikelihood, UniformPolicyLengthThree) {
    Trajectory t{0, {{0, 1}, {1, 4}, {2, 0}}, false};
    EXPECT_NEAR(trajectory_log_likelihood(t, Policy::uniform(3, 5)), 3.0 * std::log(0.2), 1e-12);
    EXPECT_NEAR(3.0 * std::log(0.2), -4.8283, 1e-4);
}

TEST(LogLikelihood, BoltzmannOnChainByHand) {
    const auto m = two_state_chain(0.9);
    const std::vector<double> r{-1.0, 100.0};
    const auto q = value_iteration(m, r, 1e-12);
    const auto pi = boltzmann_policy(q, 1.0);
    Trajectory t{0, {{0, 1}, {0, 1}, {0, 0}}, true};
    const double q0 = q(0, 0), q1 = q(0, 1);
    const double lz = std::log(std::exp(q0 - q0) + std::exp(q1 - q0)) + q0;
    EXPECT_NEAR(trajectory_log_likelihood(t, pi), 2.0 * (q1 - lz) + (q0 - lz), 1e-9);
}

TEST(ExpectedReturn, OptimalPolicyMatchesPlanner) {
    const auto env = make_structured_gridworld(4);
    const auto r = env.true_rewards();
    const auto q = value_iteration(env.mdp, r, 1e-11);
    const auto pi = Policy::deterministic(kGridActions, greedy_actions(q));
    for (int s : {0, 7, 20, 35}) {
        std::vector<double> d(env.mdp.num_states, 0.0);
        d[s] = 1.0;
        EXPECT_NEAR(expected_return(env.mdp, pi, r, d), q.value(s), 1e-7);
    }
}

TEST(ExpectedReturn, AbsorbingGeometricSeries) {
    const auto m = tabular_mdp(2, {{{{0, 1.0}}, {{0, 1.0}}}}, {0}, 0.5);
    const std::vector<double> r{-1.0}, d{1.0};
    EXPECT_NEAR(expected_return(m, Policy::uniform(1, 2), r, d), -2.0, 1e-12);
}

TEST(ExpectedReturn, RandomPolicyMatchesMonteCarlo) {
    const double gamma = 0.9;
    const auto m = two_state_chain(gamma);
    const std::vector<double> r{-1.0, 100.0}, d{1.0, 0.0};
    const auto pi = Policy::uniform(2, 2);
    const double exact = expected_return(m, pi, r, d);
    // Closed form: V = -1 + 0.9 * (0.5 * 100 + 0.5 * V).
    EXPECT_NEAR(exact, (-1.0 + 0.9 * 50.0) / (1.0 - 0.45), 1e-9);

    Rng rng(2024);
    const int n = 100000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        int s = 0;
        double ret = 0.0, disc = 1.0;
        while (true) {
            ret += disc * r[s];
            if (m.is_terminal(s)) break;
            s = m.step(s, static_cast<int>(uniform_index(rng, 2)), rng);
            disc *= gamma;
            if (disc < 1e-12) break;
        }
        sum += ret;
        sum2 += ret * ret;
    }
    const double mean = sum / n, se = std::sqrt((sum2 / n - mean * mean) / n);
    EXPECT_NEAR(mean, exact, 3.0 * se);
}
