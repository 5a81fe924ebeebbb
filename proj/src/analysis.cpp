#include "sastep/analysis.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace sastep {

void ErrorCurve::add(std::int64_t step, double value) {
    if (!points.empty() && step <= points.back().first)
        throw std::invalid_argument("ErrorCurve: steps must be strictly increasing");
    points.emplace_back(step, value);
}

namespace {

// Solves the 3x3 normal equations by Cramer's rule.
std::optional<std::array<double, 3>> solve3(const std::array<std::array<double, 3>, 3>& a,
                                            const std::array<double, 3>& b) {
    auto det = [](const std::array<std::array<double, 3>, 3>& m) {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
               m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    };
    const double d = det(a);
    if (std::abs(d) < 1e-300) return std::nullopt;
    std::array<double, 3> x{};
    for (int k = 0; k < 3; ++k) {
        auto m = a;
        for (int r = 0; r < 3; ++r) m[r][k] = b[r];
        x[k] = det(m) / d;
    }
    return x;
}

}  // namespace

RateFit fit_rate(const ErrorCurve& curve, std::int64_t burn_in) {
    std::vector<double> lx, ly;
    for (const auto& [n, v] : curve.points) {
        if (n <= burn_in) continue;
        if (n <= 0) throw std::invalid_argument("fit_rate: steps must be positive");
        if (!(v > 0.0)) throw std::invalid_argument("fit_rate: values must be positive");
        lx.push_back(std::log(static_cast<double>(n)));
        ly.push_back(std::log(v));
    }
    if (lx.size() < 10) throw std::invalid_argument("fit_rate: need at least 10 points after burn-in");

    const double k = static_cast<double>(lx.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
    }
    RateFit fit;
    fit.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / k;

    bool defined = true;
    for (double x : lx) defined = defined && x > 1.0;
    if (defined) {
        std::array<std::array<double, 3>, 3> a{};
        std::array<double, 3> b{};
        for (std::size_t i = 0; i < lx.size(); ++i) {
            const std::array<double, 3> row{1.0, lx[i], std::log(lx[i])};
            for (int r = 0; r < 3; ++r) {
                b[r] += row[r] * ly[i];
                for (int c = 0; c < 3; ++c) a[r][c] += row[r] * row[c];
            }
        }
        if (auto x = solve3(a, b)) {
            fit.refined_slope = (*x)[1];
            fit.loglog_coefficient = (*x)[2];
        }
    }
    return fit;
}

}  // namespace sastep
