#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "activeirl/acquisition.hpp"
#include "activeirl/gridworlds.hpp"

using namespace airl;

namespace {

BOConfig unit_prior() {
    BOConfig c;
    c.mu_prior = 0.0;
    c.sigma_prior = 1.0;
    return c;
}

BOEntry fresh(double eps = 1.0) {
    BOEntry e;
    e.eps = eps;
    return e;
}

}  // namespace

TEST(BoGaussian, NoDataIsPrior) {
    const auto cfg = unit_prior();
    const auto [mu, sd] = bo_posterior(123.0, 0, 0.7, cfg);
    EXPECT_EQ(mu, 0.0);
    EXPECT_EQ(sd, 1.0);
}

TEST(BoGaussian, DirectSubstitution) {
    const std::vector<double> obs{2.0};
    const auto e = bo_gaussian_update(fresh(), obs, unit_prior());
    EXPECT_NEAR(e.mu, 1.0, 1e-15);
    EXPECT_NEAR(e.sigma * e.sigma, 0.5, 1e-15);
}

TEST(BoGaussian, FlatPriorLimit) {
    BOConfig cfg;
    cfg.sigma_prior = 1e6;
    const std::vector<double> obs{0.3, 0.9, 0.45};
    const auto e = bo_gaussian_update(fresh(0.2), obs, cfg);
    EXPECT_NEAR(e.mu, 0.55, 0.55 * 1e-6);
}

TEST(BoGaussian, OrderIndependent) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.4, 0.3);
    std::vector<double> obs(50);
    for (auto& x : obs) x = g(rng);
    const BOConfig cfg;
    const auto batch = bo_gaussian_update(fresh(0.3), obs, cfg);
    BOEntry one = fresh(0.3);
    for (double x : obs) one = bo_gaussian_update(one, std::span<const double>(&x, 1), cfg);
    auto shuffled = obs;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto perm = bo_gaussian_update(fresh(0.3), shuffled, cfg);
    EXPECT_NEAR(batch.mu, one.mu, 1e-10);
    EXPECT_NEAR(batch.sigma, one.sigma, 1e-10);
    EXPECT_NEAR(batch.mu, perm.mu, 1e-10);
    EXPECT_NEAR(batch.obs_m2, perm.obs_m2, 1e-10);
}

TEST(BoGaussian, RejectsNonPositiveNoise) {
    const std::vector<double> obs{1.0};
    EXPECT_THROW(bo_gaussian_update(fresh(0.0), obs, BOConfig{}), InputError);
}

TEST(BoNoise, SingleObservationAtPriorMeanGivesPriorMode) {
    const BOConfig cfg;
    const std::vector<double> obs{cfg.mu_prior};
    const auto e = bo_gaussian_update(fresh(), obs, cfg);
    EXPECT_NEAR(bo_noise_map_update(e, cfg), cfg.noise_prior_mode(), 1e-12);
    EXPECT_NEAR(cfg.noise_prior_mode(), std::exp(-1.0), 1e-15);
}

TEST(BoNoise, ReturnedValueBeatsRandomProbes) {
    std::mt19937_64 rng(11);
    const BOConfig cfg;
    for (int trial = 0; trial < 20; ++trial) {
        std::normal_distribution<double> g(1.0, 0.1 + 0.2 * trial);
        std::vector<double> obs(2 + trial);
        for (auto& x : obs) x = g(rng);
        const auto e = bo_gaussian_update(fresh(), obs, cfg);
        for (bool newton : {true, false}) {
            const double eps = bo_noise_map_update(e, cfg, newton);
            const double best = bo_noise_objective(e, eps, cfg);
            std::uniform_real_distribution<double> u(std::log(1e-3), std::log(1e3));
            for (int p = 0; p < 10; ++p) EXPECT_GE(best + 1e-9, bo_noise_objective(e, std::exp(u(rng)), cfg));
        }
    }
}

TEST(BoNoise, RecoversKnownNoise) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.8, 0.5);
    std::vector<double> obs(200);
    for (auto& x : obs) x = g(rng);
    BOConfig cfg;
    cfg.sigma_prior = 100.0;
    cfg.phi_log_sd = 10.0;
    const auto e = bo_gaussian_update(fresh(), obs, cfg);
    const double eps = bo_noise_map_update(e, cfg);
    EXPECT_GE(eps, 0.4);
    EXPECT_LE(eps, 0.6);
}

TEST(Ucb, ExplorationBonusWins) {
    std::vector<BOEntry> entries(2);
    entries[0].mu = 1.0;
    entries[0].sigma = 0.0;
    entries[1].mu = 0.0;
    entries[1].sigma = 1.0;
    EXPECT_EQ(ucb_select(entries, 3.0), 1u);
    EXPECT_EQ(ucb_select(entries, 0.0), 0u);
}

TEST(Ucb, TiesGoToFirst) {
    std::vector<BOEntry> entries(3);
    for (auto& e : entries) e.mu = 0.5, e.sigma = 0.1;
    EXPECT_EQ(ucb_select(entries, 3.0), 0u);
}

class BoEnv : public ::testing::Test {
protected:
    Environment env = make_structured_gridworld(0);
    PosteriorSampleSet posterior(std::uint64_t seed, int n = 50) const {
        Rng rng(seed);
        std::vector<Theta> thetas;
        for (int i = 0; i < n; ++i) thetas.push_back(env.prior.sample(rng));
        return PosteriorSampleSet::from_thetas(thetas, env);
    }
};

TEST_F(BoEnv, BudgetBelowMinimumThrows) {
    BOConfig bo;
    bo.init_samples_per_state = 4;
    bo.total_budget = 10;
    EXPECT_THROW(bo_ucb_eig({0, 1, 2}, posterior(1), env.mdp, EIGConfig{}, bo), InputError);
}

TEST_F(BoEnv, SpendsExactlyTheBudget) {
    BOConfig bo;
    bo.total_budget = 500;
    const auto cands = env.mdp.non_terminal_states();
    const auto res = bo_ucb_eig(cands, posterior(2), env.mdp, EIGConfig{}, bo);
    EXPECT_EQ(res.total_samples(), 500);
    for (const auto& c : res.scores) EXPECT_GE(c.n_samples, bo.init_samples_per_state);
    EXPECT_EQ(res.chosen, argmax_state(res.scores));
}

TEST_F(BoEnv, DefaultBudgetMatchesNmc) {
    const auto cands = env.mdp.non_terminal_states();
    const EIGConfig eig;
    const auto res = bo_ucb_eig(cands, posterior(3), env.mdp, eig, BOConfig{});
    EXPECT_EQ(res.total_samples(), static_cast<long>(cands.size()) * eig.n_rewards * eig.n_trajectories);
}

TEST_F(BoEnv, Deterministic) {
    const auto cands = env.mdp.non_terminal_states();
    const auto post = posterior(4);
    const auto a = bo_ucb_eig(cands, post, env.mdp, EIGConfig{}, BOConfig{});
    const auto b = bo_ucb_eig(cands, post, env.mdp, EIGConfig{}, BOConfig{});
    ASSERT_EQ(a.scores.size(), b.scores.size());
    for (std::size_t i = 0; i < a.scores.size(); ++i) {
        EXPECT_EQ(a.scores[i].score, b.scores[i].score);
        EXPECT_EQ(a.scores[i].n_samples, b.scores[i].n_samples);
    }
}

// kappa = 0, large matched budgets: both estimators settle on the same argmax.
TEST_F(BoEnv, GreedyAgreesWithNmc) {
    const auto cands = env.mdp.non_terminal_states();
    EIGConfig eig;
    eig.n_trajectories = 200;
    const int per_state = eig.n_rewards * eig.n_trajectories;
    int agree = 0;
    const int trials = 50;
    for (int t = 0; t < trials; ++t) {
        eig.seed = static_cast<std::uint64_t>(t);
        const auto post = posterior(100 + t);
        BOConfig bo;
        bo.kappa = 0.0;
        bo.sigma_prior = 1e3;
        bo.init_samples_per_state = per_state;
        bo.total_budget = static_cast<long>(per_state) * static_cast<long>(cands.size()) + 4L * per_state;
        const auto a = eig_nmc(cands, post, env.mdp, eig);
        const auto b = bo_ucb_eig(cands, post, env.mdp, eig, bo);
        agree += a.chosen == b.chosen;
    }
    EXPECT_GE(agree, 45);
}
