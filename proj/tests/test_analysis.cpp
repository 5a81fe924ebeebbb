#include <gtest/gtest.h>

#include <cmath>

#include "sastep/analysis.hpp"

using namespace sastep;

namespace {

template <class F>
ErrorCurve curve(F f, int n = 200) {
    ErrorCurve c;
    for (int k = 1; k <= n; ++k) c.add(10 * k, f(10.0 * k));
    return c;
}

}  // namespace

TEST(FitRate, ExactPowerLaws) {
    EXPECT_NEAR(fit_rate(curve([](double n) { return 1.0 / n; })).slope, -1.0, 1e-12);
    EXPECT_NEAR(fit_rate(curve([](double n) { return 1.0 / std::sqrt(n); })).slope, -0.5, 1e-12);
    const auto f = fit_rate(curve([](double n) { return 3.0 * std::pow(n, -0.7); }));
    EXPECT_NEAR(f.intercept, std::log(3.0), 1e-10);
}

TEST(FitRate, LogLogRegressorRecoversLogFactor) {
    const auto f = fit_rate(curve([](double n) { return std::log(n) / n; }));
    ASSERT_TRUE(f.refined_slope.has_value());
    EXPECT_NEAR(*f.refined_slope, -1.0, 1e-8);
    EXPECT_NEAR(*f.loglog_coefficient, 1.0, 1e-8);
    EXPECT_GT(f.slope, -1.0);  // the plain fit is biased by the log factor
}

TEST(FitRate, BurnInDropsEarlyPoints) {
    ErrorCurve c;
    for (int k = 1; k <= 50; ++k) c.add(k, k <= 20 ? 1.0 : 1.0 / k);
    EXPECT_NEAR(fit_rate(c, 20).slope, -1.0, 1e-12);
}

TEST(FitRate, RejectsBadCurves) {
    ErrorCurve c;
    for (int k = 1; k <= 5; ++k) c.add(k, 1.0);
    EXPECT_THROW(fit_rate(c), std::invalid_argument);
    ErrorCurve z;
    for (int k = 1; k <= 20; ++k) z.add(k, k == 7 ? 0.0 : 1.0);
    EXPECT_THROW(fit_rate(z), std::invalid_argument);
    ErrorCurve order;
    order.add(5, 1.0);
    EXPECT_THROW(order.add(5, 1.0), std::invalid_argument);
}
