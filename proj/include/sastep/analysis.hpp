#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sastep {

struct ErrorCurve {
    std::vector<std::pair<std::int64_t, double>> points;
    std::string label;

    void add(std::int64_t step, double value);
};

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    // Coefficients of log v = a + s log n + r log log n over the same points;
    // empty when log log n is not defined on every point (n <= e).
    std::optional<double> refined_slope;
    std::optional<double> loglog_coefficient;
};

// Least-squares slope of log(value) against log(step) for steps > burn_in.
RateFit fit_rate(const ErrorCurve& curve, std::int64_t burn_in = 0);

}  // namespace sastep
