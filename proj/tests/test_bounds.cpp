#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "sastep/bounds.hpp"
#include "sastep/random.hpp"

using namespace sastep;

TEST(Lemma5, HandEvaluationAtTwo) {
    const std::vector<double> mu{0.3, 0.6}, a{0.5, 0.2}, b{0.9, 0.4}, eps{2.0, 1.0};
    const auto r = lemma5_recursion(mu, a, b, eps, 2);
    EXPECT_DOUBLE_EQ(r.direct[0], 2.0);
    EXPECT_NEAR(r.direct[1], 1.0 + 0.6 * 0.5 * 0.9 * 2.0, 1e-15);
    EXPECT_NEAR(r.representation[1], r.direct[1], 1e-15);
}

TEST(Lemma5, RandomInstancesAgree) {
    Rng rng = make_stream(21, 0);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 50;
        std::vector<double> mu(n), a(n), b(n), eps(n);
        double mass = 0.0;
        for (int k = 0; k < n; ++k) {
            mu[k] = uniform01(rng);
            b[k] = uniform01(rng);
            eps[k] = uniform01(rng);
            mass += (a[k] = uniform01(rng));
        }
        for (double& x : a) x /= mass;
        EXPECT_LE(lemma5_recursion(mu, a, b, eps, n).gap, 1e-12);
    }
}

TEST(Lemma5, RejectsNegativeInput) {
    const std::vector<double> ok{0.5, 0.5}, bad{0.5, -0.1};
    EXPECT_THROW(lemma5_recursion(ok, bad, ok, ok, 2), std::invalid_argument);
}

TEST(ConvolutionPowers, FirstPowerIsInput) {
    const std::vector<double> a{0.2, 0.3, 0.1};
    EXPECT_EQ(convolution_powers(a, 1, 3).powers.front(), a);
}

TEST(ConvolutionPowers, PointMassAtOneIsAFixedPoint) {
    const std::vector<double> delta{1.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    const auto p = convolution_powers(delta, 5, 6);
    for (const auto& power : p.powers) EXPECT_EQ(power, delta);
    for (double c : p.sup_change) EXPECT_DOUBLE_EQ(c, 0.0);
}

TEST(ConvolutionPowers, HandConvolution) {
    // a^{*2}_k = sum_{l <= k} a_{k-l+1} a_l
    const std::vector<double> a{0.5, 0.25, 0.125};
    const auto p = convolution_powers(a, 2, 3);
    EXPECT_DOUBLE_EQ(p.powers[1][0], 0.25);
    EXPECT_DOUBLE_EQ(p.powers[1][1], 0.25 * 0.5 + 0.5 * 0.25);
    EXPECT_DOUBLE_EQ(p.powers[1][2], 0.125 * 0.5 + 0.25 * 0.25 + 0.5 * 0.125);
}

TEST(ConvolutionPowers, GeometricChangesShrink) {
    std::vector<double> a(60);
    for (int k = 0; k < 60; ++k) a[k] = 0.5 * std::pow(0.5, k);
    const auto p = convolution_powers(a, 12, 60);
    for (std::size_t m = 1; m < p.sup_change.size(); ++m) EXPECT_LT(p.sup_change[m], p.sup_change[m - 1]);
}

TEST(RenewalLimit, SolvesTheConvolutionFixedPoint) {
    const auto a = two_state_return_tails(0.3, 40);
    double r = 0.0;
    for (double x : a) r += x;
    std::vector<double> abar(a);
    for (double& x : abar) x /= r;
    const auto x = renewal_limit(abar, 40);
    EXPECT_DOUBLE_EQ(x[0], abar[0]);
    for (int k = 2; k <= 40; ++k) {
        double conv = 0.0;
        for (int l = 1; l <= k; ++l) conv += abar[k - l] * x[l - 1];
        EXPECT_NEAR(conv, x[k - 1], 1e-14);
    }
}

TEST(TwoStateTails, Values) {
    const auto a = two_state_return_tails(0.3, 4);
    EXPECT_DOUBLE_EQ(a[0], 1.0);
    EXPECT_DOUBLE_EQ(a[1], 0.3);
    EXPECT_NEAR(a[2], 0.3 * 0.7, 1e-16);
    EXPECT_NEAR(a[3], 0.3 * 0.49, 1e-16);
}

TEST(Theorem1Bound, ZeroInputGivesZero) {
    BoundSequences s;
    s.eps_bar.assign(10, 0.0);
    s.r.assign(10, 0.2);
    s.a_star.assign(10, 0.5);
    for (int n = 1; n <= 10; ++n) EXPECT_DOUBLE_EQ(theorem1_bound(s, 3.0, n), 0.0);
}

TEST(Theorem1Bound, SingleCompositionAtThree) {
    BoundSequences s;
    s.eps_bar = {0.7, 0.4, 0.9};
    s.r = {0.1, 0.2, 0.3};
    s.a_star = {0.6, 0.3, 0.1};
    // only (l, j, i) = (1, 1, 1): eps_1 * exp(-r_3) * a*_1
    EXPECT_NEAR(theorem1_bound(s, 2.0, 3), 2.0 * 0.7 * std::exp(-0.3) * 0.6, 1e-15);
    EXPECT_DOUBLE_EQ(theorem1_bound(s, 2.0, 2), 0.0);
}

TEST(Theorem1Bound, FourEnumeratesThreeCompositions) {
    BoundSequences s;
    s.eps_bar = {0.7, 0.4, 0.9, 0.2};
    s.r = {0.1, 0.2, 0.3, 0.4};
    s.a_star = {0.6, 0.3, 0.1, 0.05};
    const double mu1 = std::exp(-0.4), mu2 = std::exp(-0.7);
    const double expected = 0.7 * mu1 * 0.3 + 0.4 * mu1 * 0.6 + 0.7 * mu2 * 0.6;
    EXPECT_NEAR(theorem1_bound(s, 1.0, 4), expected, 1e-15);
}

TEST(BoundSequences, EpsilonConvolution) {
    const std::vector<double> a{1.0, 0.5, 0.25}, mu{0.9, 0.8, 0.7}, b{1.0, 2.0, 3.0}, M{0.1, 0.2, 0.3};
    const auto s = make_bound_sequences(a, mu, b, 4.0, M, 3);
    EXPECT_DOUBLE_EQ(s.eps_bar[0], 4.0);
    EXPECT_DOUBLE_EQ(s.eps_bar[1], 2.0 * (4.0 * 0.5 + 1.0 * 0.1));
    EXPECT_DOUBLE_EQ(s.eps_bar[2], 3.0 * (4.0 * 0.25 + 0.5 * 0.1 + 1.0 * 0.2));
    EXPECT_NEAR(s.r[2], 0.3, 1e-15);
}

TEST(Theorem1Check, CalibratedAtItsHorizon) {
    TwoStateChain chain;
    Rng rng = make_stream(0, 0);
    const auto c = check_theorem1_two_state(chain, 40, 4000, 10, rng);
    EXPECT_GT(c.B_prime, 0.0);
    EXPECT_NEAR(c.bound[9], c.simulated[9], 1e-12);
    EXPECT_DOUBLE_EQ(c.bound[0], 0.0);
    EXPECT_DOUBLE_EQ(c.simulated[0], chain.delta0 * chain.delta0);
}

TEST(Prop5, ZeroRateKeepsError) {
    SyntheticQuadratic p;
    ContractionSetup s;
    s.gamma = 0.0;
    Rng rng = make_stream(0, 0);
    const auto r = prop5_contraction_check(p, s, 1000, rng);
    EXPECT_DOUBLE_EQ(r.mc_mean, r.e_k);
    EXPECT_DOUBLE_EQ(r.bound, r.e_k);
    EXPECT_FALSE(r.violated);
}

TEST(Prop5, RlMatchesExactExpectation) {
    // E[(d - g(d - sigma Z))^2] = (1 - g)^2 d^2 + g^2 sigma^2
    SyntheticQuadratic p;
    p.q = 1.0;
    ContractionSetup s;
    s.gamma = 0.3;
    Rng rng = make_stream(1, 0);
    const auto r = prop5_contraction_check(p, s, 100000, rng);
    EXPECT_NEAR(r.mc_mean, 0.49 + 0.09, 4 * r.mc_standard_error);
    EXPECT_FALSE(r.violated);
}

TEST(ErrorModel, ClampAndGreedy) {
    ErrorModel m{1.0, 1.0, 0.5};
    EXPECT_TRUE(std::isinf(m.x2()));
    EXPECT_DOUBLE_EQ(m.one_step(1.0, 0.0, -5.0), 0.0);
    // greedy gamma minimises the noiseless one-step map over a fine grid
    for (double e : {0.1, 1.0, 7.0}) {
        double best = 1e300;
        for (int k = 0; k <= 20000; ++k) best = std::min(best, m.one_step(e, k * 1e-4, 0.0));
        EXPECT_NEAR(m.one_step(e, m.greedy_gamma(e), 0.0), m.greedy_value(e), 1e-12);
        EXPECT_LE(m.greedy_value(e), best + 1e-12);
        EXPECT_NEAR(m.greedy_value(e), best, 1e-6);
    }
    ErrorModel tight{2.0, 3.0, 0.0};
    EXPECT_NEAR(tight.x2(), 2.0 * (2.0 / std::sqrt(4.0 - 3.0) - 1.0), 1e-15);
    EXPECT_DOUBLE_EQ(tight.one_step(100.0, 0.0, 0.0), tight.x2());
}
