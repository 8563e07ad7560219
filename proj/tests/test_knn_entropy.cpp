#include <gtest/gtest.h>

#include <cmath>

#include "activeirl/knn_entropy.hpp"

using namespace airl;

namespace {

std::vector<double> draws(int n, int dim, Rng& rng, bool uniform, double scale = 1.0) {
    std::vector<double> x(static_cast<std::size_t>(n) * dim);
    std::normal_distribution<double> g(0.0, 1.0);
    for (auto& v : x) v = scale * (uniform ? uniform01(rng) : g(rng));
    return x;
}

}  // namespace

TEST(KnnEntropy, StandardNormal1D) {
    Rng rng(1);
    EXPECT_NEAR(knn_entropy(draws(10000, 1, rng, false), 1).nats, 0.5 * std::log(2 * M_PI * M_E), 0.05);
}

TEST(KnnEntropy, Uniform01) {
    Rng rng(2);
    EXPECT_NEAR(knn_entropy(draws(10000, 1, rng, true), 1).nats, 0.0, 0.05);
}

TEST(KnnEntropy, ScalingShiftsByLogC) {
    Rng a(3), b(3);
    const double h1 = knn_entropy(draws(10000, 1, a, false), 1).nats;
    const double h2 = knn_entropy(draws(10000, 1, b, false, 2.0), 1).nats;
    EXPECT_NEAR(h2 - h1, std::log(2.0), 0.05);
}

TEST(KnnEntropy, MultivariateNormal) {
    Rng rng(4);
    const int d = 3;
    EXPECT_NEAR(knn_entropy(draws(5000, d, rng, false), d).nats, 0.5 * d * std::log(2 * M_PI * M_E), 0.1);
}

TEST(KnnEntropy, TranslationInvariant) {
    Rng rng(5);
    auto x = draws(500, 2, rng, false);
    const double h = knn_entropy(x, 2).nats;
    for (auto& v : x) v += 1e4;
    EXPECT_NEAR(knn_entropy(x, 2).nats, h, 1e-6);
}

TEST(KnnEntropy, DuplicatesJitterDeterministically) {
    std::vector<double> x(60, 2.5);
    const auto a = knn_entropy(x, 3), b = knn_entropy(x, 3);
    EXPECT_TRUE(a.jittered);
    EXPECT_EQ(a.nats, b.nats);
    EXPECT_LT(a.nats, -40.0);
}

TEST(KnnEntropy, Preconditions) {
    EXPECT_THROW(knn_entropy(std::vector<double>(5, 0.0), 1, 5), InputError);
    EXPECT_THROW(knn_entropy(std::vector<double>(7, 0.0), 2, 1), InputError);
}

TEST(KnnEntropy, DigammaAndBallVolume) {
    EXPECT_NEAR(detail::digamma_int(1), -0.5772156649015329, 1e-15);
    EXPECT_NEAR(detail::digamma_int(5), -0.5772156649015329 + 1 + 0.5 + 1.0 / 3 + 0.25, 1e-14);
    EXPECT_NEAR(std::exp(detail::log_unit_ball_volume(1)), 2.0, 1e-12);
    EXPECT_NEAR(std::exp(detail::log_unit_ball_volume(2)), M_PI, 1e-12);
    EXPECT_NEAR(std::exp(detail::log_unit_ball_volume(3)), 4.0 * M_PI / 3.0, 1e-12);
}
