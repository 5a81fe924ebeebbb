#include "sastep/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <stdexcept>

namespace sastep {

namespace {

void need(std::span<const double> s, int n, const char* name) {
    if (static_cast<int>(s.size()) < n)
        throw std::invalid_argument(std::string(name) + " shorter than the requested horizon");
}

}  // namespace

std::vector<double> renewal_sequence(std::span<const double> mu, std::span<const double> a,
                                     std::span<const double> b, int j, int len) {
    if (j < 1 || len < 1) throw std::invalid_argument("renewal_sequence: j and len must be >= 1");
    need(mu, j + len - 1, "mu");
    need(b, j + len - 1, "b");
    need(a, len, "a");
    std::vector<double> out(static_cast<std::size_t>(len));
    out[0] = 1.0;
    for (int k = 1; k < len; ++k) {
        double s = 0.0;
        for (int l = 1; l <= k; ++l) s += a[k - l] * b[l + j - 2] * out[l - 1];
        out[k] = mu[k + j - 1] * s;
    }
    return out;
}

Lemma5Result lemma5_recursion(std::span<const double> mu, std::span<const double> a,
                              std::span<const double> b, std::span<const double> epsilon, int n) {
    if (n < 1) throw std::invalid_argument("lemma5: n must be >= 1");
    need(mu, n, "mu");
    need(a, n, "a");
    need(b, n, "b");
    need(epsilon, n, "epsilon");
    for (auto s : {mu, a, b, epsilon})
        for (int k = 0; k < n; ++k)
            if (s[k] < 0.0) throw std::invalid_argument("lemma5: sequences must be non-negative");

    Lemma5Result r;
    r.direct.resize(n);
    for (int m = 1; m <= n; ++m) {
        double s = 0.0;
        for (int j = 1; j < m; ++j) s += a[m - j - 1] * b[j - 1] * r.direct[j - 1];
        r.direct[m - 1] = epsilon[m - 1] + mu[m - 1] * s;
    }

    // The j-th shifted sequence is shared by every v_m with m >= j.
    std::vector<std::vector<double>> shifted(n);
    for (int j = 1; j <= n; ++j) shifted[j - 1] = renewal_sequence(mu, a, b, j, n + 1 - j);
    r.representation.resize(n);
    for (int m = 1; m <= n; ++m) {
        double s = 0.0;
        for (int j = 1; j <= m; ++j) s += shifted[j - 1][m - j] * epsilon[j - 1];
        r.representation[m - 1] = s;
    }
    for (int m = 0; m < n; ++m)
        r.gap = std::max(r.gap, std::abs(r.direct[m] - r.representation[m]));
    return r;
}

ConvolutionPowers convolution_powers(std::span<const double> a_bar, int m_max, int k_max) {
    if (m_max < 1 || k_max < 1) throw std::invalid_argument("convolution_powers: sizes must be >= 1");
    need(a_bar, k_max, "a_bar");
    const double mass = std::accumulate(a_bar.begin(), a_bar.begin() + k_max, 0.0);
    if (mass > 1.0 + 1e-12) throw std::invalid_argument("convolution_powers: a_bar sums above 1");

    ConvolutionPowers out;
    out.powers.emplace_back(a_bar.begin(), a_bar.begin() + k_max);
    for (int m = 1; m < m_max; ++m) {
        const auto& prev = out.powers.back();
        std::vector<double> next(static_cast<std::size_t>(k_max), 0.0);
        double change = 0.0;
        for (int k = 1; k <= k_max; ++k) {
            double s = 0.0;
            for (int l = 1; l <= k; ++l) s += a_bar[k - l] * prev[l - 1];
            next[k - 1] = s;
            change = std::max(change, std::abs(s - prev[k - 1]));
        }
        out.sup_change.push_back(change);
        out.powers.push_back(std::move(next));
    }
    return out;
}

std::vector<double> renewal_limit(std::span<const double> a_bar, int k_max) {
    need(a_bar, k_max, "a_bar");
    if (!(a_bar[0] < 1.0)) throw std::invalid_argument("renewal_limit: a_bar_1 must be < 1");
    std::vector<double> x(static_cast<std::size_t>(k_max));
    x[0] = a_bar[0];
    for (int k = 2; k <= k_max; ++k) {
        double s = 0.0;
        for (int l = 1; l < k; ++l) s += a_bar[k - l] * x[l - 1];
        x[k - 1] = s / (1.0 - a_bar[0]);
    }
    return x;
}

BoundSequences make_bound_sequences(std::span<const double> a, std::span<const double> mu,
                                    std::span<const double> b, double e1,
                                    std::span<const double> expected_M, int n_max) {
    need(a, n_max, "a");
    need(mu, n_max, "mu");
    need(b, n_max, "b");
    need(expected_M, n_max, "expected_M");
    const double r = std::accumulate(a.begin(), a.end(), 0.0);
    if (!(r > 0.0)) throw std::invalid_argument("bound: return tails sum to zero");
    std::vector<double> a_bar(a.begin(), a.end());
    for (double& x : a_bar) x /= r;

    BoundSequences s;
    s.eps_bar.resize(n_max);
    s.r.resize(n_max);
    for (int n = 1; n <= n_max; ++n) {
        double eps = e1 * a[n - 1];
        for (int j = 1; j < n; ++j) eps += a[n - j - 1] * expected_M[j - 1];
        s.eps_bar[n - 1] = b[n - 1] * eps;
        s.r[n - 1] = 1.0 - mu[n - 1];
    }
    s.a_star = renewal_limit(a_bar, n_max);
    return s;
}

double theorem1_bound(const BoundSequences& s, double B_prime, int n) {
    if (n < 1) throw std::invalid_argument("theorem1_bound: n must be >= 1");
    need(s.eps_bar, n, "eps_bar");
    need(s.r, n, "r");
    need(s.a_star, n, "a_star");
    // mu_bar^n_l for l = 1..n via a running tail sum of r.
    std::vector<double> mu_bar(static_cast<std::size_t>(n) + 1, 1.0);
    double tail = 0.0;
    for (int l = 1; l <= n; ++l) {
        tail += s.r[n - l];
        mu_bar[l] = std::exp(-tail);
    }
    double total = 0.0;
    for (int l = 1; l <= n - 2; ++l)
        for (int j = 1; l + j <= n - 1; ++j) {
            const int i = n - l - j;
            total += s.eps_bar[j - 1] * mu_bar[l] * s.a_star[i - 1];
        }
    return B_prime * total;
}

std::vector<double> two_state_return_tails(double p, int len) {
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("switch probability must lie in (0, 1]");
    std::vector<double> a(static_cast<std::size_t>(len));
    for (int j = 1; j <= len; ++j) a[j - 1] = j == 1 ? 1.0 : p * std::pow(1.0 - p, j - 2);
    return a;
}

Theorem1Check check_theorem1_two_state(const TwoStateChain& c, int horizon, int replications,
                                       int calibration_horizon, Rng& rng) {
    if (horizon < 3 || calibration_horizon < 3 || calibration_horizon > horizon)
        throw std::invalid_argument("theorem1 check: horizons must satisfy 3 <= calibration <= horizon");
    if (replications < 2) throw std::invalid_argument("theorem1 check: need replications >= 2");

    // e^1 is the starting error; the chain sits at z1 at step 1 and an update at
    // step k produces e^{k+1}.
    std::vector<double> sum(horizon, 0.0), sum_sq(horizon, 0.0);
    for (int rep = 0; rep < replications; ++rep) {
        double q = c.delta0;  // q* = 0
        bool at_z1 = true;
        for (int n = 1; n <= horizon; ++n) {
            const double e = q * q;
            sum[n - 1] += e;
            sum_sq[n - 1] += e * e;
            if (at_z1) q -= c.gamma * (q - c.sigma * standard_normal(rng));
            if (uniform01(rng) < c.switch_p) at_z1 = !at_z1;
        }
    }

    Theorem1Check out;
    out.calibration_horizon = calibration_horizon;
    const double reps = replications;
    for (int n = 0; n < horizon; ++n) {
        const double mean = sum[n] / reps;
        out.simulated.push_back(mean);
        out.standard_error.push_back(std::sqrt(std::max(0.0, sum_sq[n] / reps - mean * mean) / (reps - 1.0)));
    }

    // Constant rate: alpha and M do not depend on the step, so b = mu = alpha.
    const double v = c.sigma * c.sigma;
    const double alpha = 1.0 - (2.0 * c.gamma - c.gamma * c.gamma);
    const double M = c.gamma * c.gamma * (4.0 + 3.0 * v);
    const int tail_len = std::max(horizon, 4000);
    const auto a = two_state_return_tails(c.switch_p, tail_len);
    const std::vector<double> mu(horizon, alpha), expected_M(horizon, M);
    const auto seq = make_bound_sequences(a, mu, mu, c.delta0 * c.delta0, expected_M, horizon);

    out.B_prime = out.simulated[calibration_horizon - 1] / theorem1_bound(seq, 1.0, calibration_horizon);
    out.bound.assign(horizon, 0.0);
    for (int n = 3; n <= horizon; ++n) {
        out.bound[n - 1] = theorem1_bound(seq, out.B_prime, n);
        out.B_prime_required = std::max(out.B_prime_required, out.B_prime * out.simulated[n - 1] / out.bound[n - 1]);
        if (out.first_violation < 0 && out.bound[n - 1] < out.simulated[n - 1]) out.first_violation = n;
    }
    return out;
}

ContractionReport prop5_contraction_check(const SyntheticQuadratic& p, const ContractionSetup& s,
                                          std::int64_t replications, Rng& rng) {
    if (replications < 2) throw std::invalid_argument("prop5 check: need replications >= 2");
    const double L = 1.0, B = 1.0, v = p.sigma * p.sigma;
    const double g = s.gamma;
    const double d = p.q - p.q_star;
    ContractionReport rep;

    int depth = 0;
    double slot_spread = 0.0;
    std::vector<double> slot_value;
    if (s.algorithm == Algorithm::saga) {
        depth = static_cast<int>(s.slot_q.size());
        if (depth < 1 || s.slot_x.size() != s.slot_q.size())
            throw std::invalid_argument("prop5 check: SAGA needs matching slot_q and slot_x");
        for (int j = 0; j < depth; ++j) {
            slot_value.push_back(s.slot_q[j] - s.slot_x[j]);
            // Slot error against m* evaluated on the same sample.
            slot_spread += (s.slot_q[j] - p.q_star) * (s.slot_q[j] - p.q_star);
        }
        rep.e_k = slot_spread / depth + s.saga_c * d * d;
    } else {
        rep.e_k = d * d;
    }
    const double slot_mean =
        slot_value.empty() ? 0.0 : std::accumulate(slot_value.begin(), slot_value.end(), 0.0) / depth;

    double sum = 0.0, sum_sq = 0.0, sum_gm = 0.0;
    for (std::int64_t k = 0; k < replications; ++k) {
        const double x = p.q_star + p.sigma * standard_normal(rng);
        const double m = p.q - x;
        double e_next = 0.0;
        switch (s.algorithm) {
            case Algorithm::rl: {
                const double q1 = p.q - g * m;
                e_next = (q1 - p.q_star) * (q1 - p.q_star);
                break;
            }
            case Algorithm::saga: {
                const int i = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(depth)));
                const double q1 = p.q - g * (m - slot_value[i] + slot_mean);
                const double old = (s.slot_q[i] - p.q_star) * (s.slot_q[i] - p.q_star);
                const double spread = slot_spread - old + d * d;
                e_next = spread / depth + s.saga_c * (q1 - p.q_star) * (q1 - p.q_star);
                break;
            }
            case Algorithm::pass:
            case Algorithm::pass_vec: {
                const double used = m * s.last_residual >= 0.0 ? h_increase(s.gamma_hat_prev, g, s.scheme)
                                                               : l_decrease(s.gamma_hat_prev, g, s.scheme);
                const double q1 = p.q - used * m;
                e_next = (q1 - p.q_star) * (q1 - p.q_star);
                sum_gm += used * m;
                break;
            }
        }
        sum += e_next;
        sum_sq += e_next * e_next;
    }
    const double n = static_cast<double>(replications);
    rep.mc_mean = sum / n;
    rep.mc_standard_error = std::sqrt(std::max(0.0, sum_sq / n - rep.mc_mean * rep.mc_mean) / (n - 1.0));

    switch (s.algorithm) {
        case Algorithm::rl:
            rep.alpha = 1.0 - (2.0 * L * g - B * g * g);
            rep.M = B * g * g * (4.0 + 3.0 * v);
            break;
        case Algorithm::saga: {
            const double c = s.saga_c;
            rep.alpha = std::max(1.0 - (2.0 * L * g - 3.0 * B * g * g) + B / (depth * c),
                                 1.0 - (1.0 / depth - 6.0 * g * g * c));
            rep.M = 3.0 * B * g * g * (4.0 + 3.0 * v);
            break;
        }
        case Algorithm::pass:
        case Algorithm::pass_vec: {
            // L_k = B_k = 1, so gamma_bar = 1.
            const double gamma_bar = L / B;
            rep.c_k = d != 0.0 ? (sum_gm / n) / (gamma_bar * d) : 1.0;
            const double under = std::min(rep.c_k * gamma_bar, gamma_bar);
            const double d1 = (s.r1 - 1.0) * (s.r1 - 1.0) * B;
            rep.alpha = 1.0 - (2.0 * L * under - B * under * under) + (rep.c_k >= 1.0 ? d1 * g * g : 0.0);
            rep.M = B * (rep.c_k * gamma_bar) * (rep.c_k * gamma_bar) * (4.0 + 3.0 * v);
            break;
        }
    }
    rep.bound = rep.alpha * rep.e_k + rep.M;
    rep.violated = rep.mc_mean > rep.bound + 3.0 * rep.mc_standard_error;
    return rep;
}

double ErrorModel::x2() const {
    if (B >= L * L) return std::numeric_limits<double>::infinity();
    return (2.0 + v) * (L / std::sqrt(L * L - B) - 1.0);
}

double ErrorModel::one_step(double e, double gamma, double S) const {
    const double next = (1.0 - 2.0 * L * gamma + B * gamma * gamma) * e + B * (2.0 + v) * gamma * gamma + S;
    return std::clamp(next, 0.0, x2());
}

double ErrorModel::greedy_gamma(double e) const { return optimal_gamma_rl(e, L, B, v); }

double ErrorModel::greedy_value(double e) const {
    return e - L * L * e * e / (B * (e + 2.0 + v));
}

}  // namespace sastep
