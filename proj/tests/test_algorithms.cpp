#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "sastep/action_policy.hpp"
#include "sastep/algorithms.hpp"
#include "sastep/engine.hpp"
#include "sastep/random.hpp"

using namespace sastep;

namespace {

StepSizeConfig constant(double g) {
    StepSizeConfig c;
    c.kind = ScheduleKind::constant;
    c.gamma0 = g;
    return c;
}

}  // namespace

TEST(StepRl, Arithmetic) {
    IterateTable t(2);
    StepSizePolicy p(constant(0.1), 2);
    const auto r = step_rl(t, p, {0, -1.0, 0, 0});
    EXPECT_DOUBLE_EQ(t.value(0), 0.1);
    EXPECT_DOUBLE_EQ(r.rate_used, 0.1);
    EXPECT_EQ(t.visits(0), 1u);
}

TEST(StepRl, InversePowerFirstVisitUsesEta) {
    StepSizeConfig c;
    c.kind = ScheduleKind::inverse_power;
    IterateTable t(1);
    StepSizePolicy p(c, 1);
    EXPECT_DOUBLE_EQ(step_rl(t, p, {0, 1.0, 0, 0}).rate_used, 1.0);
    EXPECT_DOUBLE_EQ(step_rl(t, p, {0, 1.0, 1, 0}).rate_used, 0.5);
}

TEST(StepSaga, HandEvaluatedUpdate) {
    IterateTable t(1);
    SagaMemory mem(1, 2);
    mem.set_slot(0, 0, 2.0);
    mem.set_slot(0, 1, 0.0);
    StepSizePolicy p(constant(0.1), 1);
    Rng rng = make_stream(0, 0);
    step_saga(t, mem, p, {0, 1.0, 0, 0}, rng, 0);
    // -0.1 * (1 - 2 + 1) = 0
    EXPECT_NEAR(t.value(0), 0.0, 1e-15);
    EXPECT_DOUBLE_EQ(mem.slot(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(mem.slot(0, 1), 0.0);
}

TEST(StepSaga, ZeroMemoryMatchesRl) {
    IterateTable a(1, 3.0), b(1, 3.0);
    SagaMemory mem(1, 4);
    StepSizePolicy pa(constant(0.2), 1), pb(constant(0.2), 1);
    Rng rng = make_stream(0, 0);
    step_saga(a, mem, pa, {0, 0.7, 0, 0}, rng);
    step_rl(b, pb, {0, 0.7, 0, 0});
    EXPECT_DOUBLE_EQ(a.value(0), b.value(0));
}

TEST(StepSaga, SingleSlotUsesResidualExactly) {
    IterateTable t(1);
    SagaMemory mem(1, 1, 5.0);
    StepSizePolicy p(constant(0.5), 1);
    Rng rng = make_stream(0, 0);
    step_saga(t, mem, p, {0, 2.0, 0, 0}, rng);
    EXPECT_DOUBLE_EQ(t.value(0), -1.0);
    EXPECT_DOUBLE_EQ(mem.slot(0, 0), 2.0);
    EXPECT_DOUBLE_EQ(mem.anchor(0, 0), 0.0);
}

TEST(StepPass, SameSignIncreases) {
    IterateTable t(1);
    PassState s(1, HlScheme::additive);
    StepSizePolicy p(constant(0.5), 1);
    const auto r1 = step_pass(t, s, p, {0, 1.0, 0, 0});
    EXPECT_EQ(r1.branch, Branch::first_visit);
    EXPECT_DOUBLE_EQ(r1.rate_used, 0.5);
    const auto r2 = step_pass(t, s, p, {0, 0.5, 1, 0});
    EXPECT_EQ(r2.branch, Branch::increase);
    EXPECT_DOUBLE_EQ(r2.rate_used, 1.0);
}

TEST(StepPass, SignFlipDecreases) {
    IterateTable t(1);
    PassState s(1, HlScheme::additive);
    s.seen[0] = 1;
    s.gamma_hat[0] = 1.5;
    s.last_base[0] = 0.5;
    s.last_residual[0] = 1.0;
    StepSizePolicy p(constant(0.5), 1);
    const auto r = step_pass(t, s, p, {0, -1.0, 0, 0});
    EXPECT_EQ(r.branch, Branch::decrease);
    EXPECT_DOUBLE_EQ(r.rate_used, 1.0);
}

TEST(StepPass, ZeroResidualCountsAsIncrease) {
    IterateTable t(1);
    PassState s(1, HlScheme::additive);
    StepSizePolicy p(constant(0.5), 1);
    step_pass(t, s, p, {0, 1.0, 0, 0});
    EXPECT_EQ(step_pass(t, s, p, {0, 0.0, 1, 0}).branch, Branch::increase);
}

TEST(StepPassVectorial, ZeroHistoryIncreasesEverywhere) {
    IterateTable t(3);
    PassState s(3, HlScheme::additive);
    StepSizePolicy p(constant(0.5), 3);
    const std::vector<char> all{1, 1, 1};
    step_pass_vectorial(t, s, p, std::vector<double>{1, 2, 3}, all, 0);
    s.last_residual.assign(3, 0.0);
    for (const auto& r : step_pass_vectorial(t, s, p, std::vector<double>{-1, 1, -2}, all, 1))
        EXPECT_EQ(r.branch, Branch::increase);
}

TEST(StepPassVectorial, OrthogonalResidualsIncrease) {
    IterateTable t(2);
    PassState s(2, HlScheme::additive);
    StepSizePolicy p(constant(0.5), 2);
    const std::vector<char> all{1, 1};
    step_pass_vectorial(t, s, p, std::vector<double>{1, 0}, all, 0);
    for (const auto& r : step_pass_vectorial(t, s, p, std::vector<double>{0, 1}, all, 1))
        EXPECT_EQ(r.branch, Branch::increase);
}

TEST(StepPassVectorial, SharedBranchFollowsWeightedInnerProduct) {
    IterateTable t(2);
    PassState s(2, HlScheme::additive);
    StepSizePolicy p(constant(0.5), 2);
    const std::vector<char> all{1, 1};
    step_pass_vectorial(t, s, p, std::vector<double>{1, 1}, all, 0);
    // 0.5 * (-3 * 1) + 0.5 * (1 * 1) < 0
    for (const auto& r : step_pass_vectorial(t, s, p, std::vector<double>{-3, 1}, all, 1))
        EXPECT_EQ(r.branch, Branch::decrease);
}

TEST(StepPassVectorial, OneHotSupportReproducesScalarPass) {
    const std::size_t n = 4;
    IterateTable ta(n, 1.0), tb(n, 1.0);
    PassState sa(n, HlScheme::two_thirds), sb(n, HlScheme::two_thirds);
    StepSizeConfig c;
    c.kind = ScheduleKind::inverse_power;
    c.eta = 2.0;
    c.alpha_exponent = 0.7;
    StepSizePolicy pa(c, n), pb(c, n);
    Rng rng = make_stream(9, 0);
    for (int k = 0; k < 500; ++k) {
        const StateIndex z = uniform_index(rng, n);
        const double m = tb.value(z) - static_cast<double>(z) + standard_normal(rng);
        step_pass(ta, sa, pa, {z, m, k, 0});
        std::vector<double> res(n, 0.0);
        std::vector<char> sup(n, 0);
        res[z] = m;
        sup[z] = 1;
        step_pass_vectorial(tb, sb, pb, res, sup, k);
        ASSERT_EQ(ta.values(), tb.values());
    }
}

TEST(Engine, UpdateTouchesOnlyVisitedCoordinate) {
    for (auto algo : {Algorithm::rl, Algorithm::saga, Algorithm::pass, Algorithm::pass_vec}) {
        EngineConfig c;
        c.algorithm = algo;
        c.stepsize = constant(0.3);
        c.initial_value = 2.0;
        Engine e(5, c);
        Rng rng = make_stream(1, 0);
        e.update(3, 1.0, rng);
        for (StateIndex z = 0; z < 5; ++z)
            if (z != 3) EXPECT_DOUBLE_EQ(e.table().value(z), 2.0);
        EXPECT_LT(e.table().value(3), 2.0);
    }
}

TEST(Engine, NoiselessMeanConvergesGeometrically) {
    // m = q - target with constant gamma: error shrinks by (1 - gamma) per update.
    EngineConfig c;
    c.algorithm = Algorithm::rl;
    c.stepsize = constant(0.25);
    Engine e(1, c);
    Rng rng = make_stream(0, 0);
    const double target = 3.0;
    for (int k = 1; k <= 20; ++k) {
        e.update(0, e.table().value(0) - target, rng);
        EXPECT_NEAR(target - e.table().value(0), target * std::pow(0.75, k), 1e-12);
    }
}

TEST(Engine, ResidualSignMovesTowardTarget) {
    // Monte-Carlo: noisy residuals with E[m] = q - target drive q toward the target from either side.
    for (double start : {-5.0, 5.0}) {
        EngineConfig c;
        c.algorithm = Algorithm::pass;
        c.stepsize.kind = ScheduleKind::inverse_power;
        c.initial_value = start;
        Engine e(1, c);
        Rng rng = make_stream(3, 0);
        for (int k = 0; k < 4000; ++k) e.update(0, e.table().value(0) - 1.0 + standard_normal(rng), rng);
        EXPECT_NEAR(e.table().value(0), 1.0, 0.1);
    }
}

TEST(Engine, EpisodeNormFeedsPcPolicy) {
    EngineConfig c;
    c.algorithm = Algorithm::rl;
    c.stepsize.kind = ScheduleKind::piecewise_constant;
    c.stepsize.gamma0 = 0.4;
    c.stepsize.pc.window = 1;
    Engine e(2, c);
    Rng rng = make_stream(0, 0);
    e.update(0, 3.0, rng);
    e.update(1, 4.0, rng);
    EXPECT_DOUBLE_EQ(e.end_episode(), 5.0);
    EXPECT_DOUBLE_EQ(e.end_episode(), 5.0);  // no improvement
    EXPECT_DOUBLE_EQ(e.policy().pc_level(), 0.2);
}

TEST(ActionPolicy, SoftmaxArithmetic) {
    const auto p = softmax(std::vector<double>{0.0, std::log(3.0)});
    EXPECT_NEAR(p[0], 0.25, 1e-15);
    EXPECT_NEAR(p[1], 0.75, 1e-15);
    const auto u = softmax(std::vector<double>{2.0, 2.0, 2.0, 2.0});
    for (double x : u) EXPECT_DOUBLE_EQ(x, 0.25);
    const auto big = softmax(std::vector<double>{1000.0, 0.0});
    EXPECT_NEAR(big[0], 1.0, 1e-15);
}

TEST(ActionPolicy, BoltzmannConcentratesOnArgmax) {
    ActionPolicySettings s;
    s.mode = ActionPolicyMode::boltzmann;
    s.beta_bar = 1e4;
    const std::vector<ActionCandidate> c{{1.0, 0.0, true}, {2.0, 0.0, true}, {0.5, 0.0, true}};
    const auto p = action_probabilities(s, c);
    EXPECT_NEAR(p[1], 1.0, 1e-12);
}

TEST(ActionPolicy, ProbabilitiesAreNormalised) {
    for (auto mode : {ActionPolicyMode::explore_softmax, ActionPolicyMode::boltzmann,
                      ActionPolicyMode::epsilon_uniform}) {
        ActionPolicySettings s;
        s.mode = mode;
        const std::vector<ActionCandidate> c{{1.0, 0.3, true}, {-2.0, 0.0, false}, {0.5, 2.0, true}};
        const auto p = action_probabilities(s, c);
        double total = 0.0;
        for (double x : p) {
            EXPECT_GE(x, 0.0);
            total += x;
        }
        EXPECT_NEAR(total, 1.0, 1e-12);
    }
}

TEST(ActionPolicy, SamplingFrequencies) {
    Rng rng = make_stream(4, 0);
    const std::vector<double> p{0.25, 0.75};
    int ones = 0;
    const int n = 40000;
    for (int i = 0; i < n; ++i) ones += sample_index(p, rng) == 1 ? 1 : 0;
    EXPECT_NEAR(static_cast<double>(ones) / n, 0.75, 0.01);
}
