#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fedgwc/reward.hpp"

using namespace fedgwc;

TEST_CASE("round stats: mean and unbiased std") {
    std::vector<LossTrace> traces{{0, {1.0, 2.0}}, {1, {3.0, 4.0}}};
    const RoundLossStats s = compute_round_stats(traces);
    CHECK(s.cohort_size == 2);
    CHECK(s.mean[0] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(s.mean[1] == doctest::Approx(3.0).epsilon(1e-15));
    // variance with divisor n-1: ((1-2)^2 + (3-2)^2)/1 = 2
    CHECK(s.stddev[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(s.stddev[1] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("round stats: identical traces give zero std") {
    const double c = 0.7315;
    std::vector<LossTrace> traces{{0, {c, c}}, {1, {c, c}}, {2, {c, c}}};
    const RoundLossStats s = compute_round_stats(traces);
    CHECK(s.mean[0] == doctest::Approx(c).epsilon(1e-15));
    CHECK(s.stddev[0] == 0.0);
    CHECK(s.stddev[1] == 0.0);
}

TEST_CASE("round stats: errors") {
    CHECK_THROWS_AS(compute_round_stats({{0, {1.0, 2.0}}}), CohortError);
    CHECK_THROWS_AS(compute_round_stats({}), CohortError);
    CHECK_THROWS_AS(compute_round_stats({{0, {1.0, 2.0}}, {1, {1.0}}}), ShapeError);
}

TEST_CASE("gaussian rewards: kernel values") {
    std::vector<LossTrace> traces{{0, {1.0}}, {1, {2.0}}, {2, {3.0}}};
    const RoundLossStats s = compute_round_stats(traces);  // mean 2, std 1
    CHECK(s.stddev[0] == doctest::Approx(1.0).epsilon(1e-15));

    // l == m -> 1
    CHECK(gaussian_rewards({1, {2.0}}, s)[0] == doctest::Approx(1.0).epsilon(1e-15));
    // l == m + sigma -> exp(-1/2)
    CHECK(gaussian_rewards({2, {3.0}}, s)[0] ==
          doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    CHECK(gaussian_rewards({2, {3.0}}, s)[0] == doctest::Approx(0.60653065971263342).epsilon(1e-12));
}

TEST_CASE("gaussian rewards: degenerate cohort conventions") {
    RoundLossStats s;
    s.mean = {2.0};
    s.stddev = {0.0};
    s.cohort_size = 3;
    CHECK(gaussian_rewards({0, {2.0}}, s)[0] == 1.0);  // on the mean
    CHECK(gaussian_rewards({0, {2.5}}, s)[0] == 0.0);  // off the mean
}

TEST_CASE("gaussian rewards: extreme outlier stays positive") {
    RoundLossStats s;
    s.mean = {0.0};
    s.stddev = {1e-6};
    s.cohort_size = 3;
    const double r = gaussian_rewards({0, {1e6}}, s)[0];
    CHECK(r > 0.0);
    CHECK(r <= 1.0);
}

TEST_CASE("gaussian rewards: shape mismatch") {
    RoundLossStats s;
    s.mean = {1.0, 2.0};
    s.stddev = {1.0, 1.0};
    CHECK_THROWS_AS(gaussian_rewards({0, {1.0}}, s), ShapeError);
}

TEST_CASE("average reward") {
    CHECK(average_reward({1.0, 1.0, 1.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(average_reward({0.5, 1.0}) == doctest::Approx(0.75).epsilon(1e-15));
    const std::vector<double> all(8, std::exp(-0.5));
    CHECK(average_reward(all) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
    CHECK_THROWS_AS(average_reward({}), ShapeError);
}

TEST_CASE("weight update: first step and fixed point") {
    GaussianWeightState st;
    update_weight(st, 7, 0.5, 0.1);
    CHECK(st.gamma.at(7) == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(st.sample_count.at(7) == 1);
    CHECK(st.gamma_of(12) == 0.0);  // never-sampled client

    GaussianWeightState fixed;
    const double g = 0.62;
    update_weight(fixed, 1, g, 0.3);  // gamma = 0.3 * g
    fixed.gamma[1] = g;
    update_weight(fixed, 1, g, 0.3);
    CHECK(fixed.gamma.at(1) == doctest::Approx(g).epsilon(1e-15));
}

TEST_CASE("weight update: parameter validation") {
    GaussianWeightState st;
    CHECK_THROWS_AS(update_weight(st, 0, 0.5, 0.0), ConfigError);
    CHECK_THROWS_AS(update_weight(st, 0, 0.5, 1.0), ConfigError);
    CHECK_THROWS_AS(update_weight(st, 0, 0.0, 0.5), DomainError);
    CHECK_THROWS_AS(update_weight(st, 0, 1.5, 0.5), DomainError);
}

TEST_CASE("weights stay in [0,1) under random update streams") {
    std::mt19937_64 eng(17);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    GaussianWeightState st;
    for (int i = 0; i < 20000; ++i) {
        const double omega = uni(eng);
        const double alpha = 0.01 + 0.98 * uni(eng);
        if (omega <= 0.0) continue;
        update_weight(st, i % 13, omega, alpha);
        const double g = st.gamma.at(i % 13);
        CHECK(g >= 0.0);
        CHECK(g < 1.0);
    }
}

// Closed-form unrolling of the recursion computed in extended precision:
// gamma_t = (1-a)^t gamma_0 + sum_tau a (1-a)^tau omega_{t - tau - 1}.
TEST_CASE("recursion matches the exact unrolled form") {
    std::mt19937_64 eng(99);
    std::uniform_real_distribution<double> uni(0.05, 1.0);
    const double alpha = 0.1;
    const int T = 10000;
    std::vector<double> omegas(T);
    for (double& w : omegas) w = uni(eng);

    GaussianWeightState st;
    for (int t = 0; t < T; ++t) update_weight(st, 0, omegas[t], alpha);

    long double acc = 0.0L;
    for (int t = 0; t < T; ++t) {
        const int tau = T - t - 1;  // weight of omega_t is a (1-a)^tau
        acc += static_cast<long double>(alpha) *
               std::pow(1.0L - static_cast<long double>(alpha), tau) *
               static_cast<long double>(omegas[t]);
    }
    const double oracle = static_cast<double>(acc);
    CHECK(std::abs(st.gamma.at(0) - oracle) / std::abs(oracle) <= 1e-12);
}

// Monte-Carlo check of the strong-convergence behaviour with a square-summable
// but not summable schedule; the full-size version runs in the acceptance suite.
TEST_CASE("harmonic schedule converges to the reward mean") {
    const double mu = 0.4;
    std::mt19937_64 eng(4242);
    std::uniform_real_distribution<double> uni(mu - 0.2, mu + 0.2);
    GaussianWeightState st;
    const int T = 20000;
    for (int t = 1; t <= T; ++t)
        update_weight(st, 0, uni(eng), 1.0 / static_cast<double>(t + 1));
    CHECK(std::abs(st.gamma.at(0) - mu) <= 0.02);
}
