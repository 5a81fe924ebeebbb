#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sastep/algorithms.hpp"
#include "sastep/random.hpp"
#include "sastep/stepsize.hpp"

namespace sastep {

// Sequences below are 1-based in the maths and stored 0-based: x[k - 1] holds x_k.

// a^{(mu,b)^j}_k for k = 1..len: the renewal-weighted sequence built from mu and
// b shifted by j - 1, with a_1 = 1 and
// a_{k+1} = mu_{k+j} sum_{l=1..k} a_{k+1-l} b_{l+j-1} a^{(mu,b)^j}_l.
std::vector<double> renewal_sequence(std::span<const double> mu, std::span<const double> a,
                                     std::span<const double> b, int j, int len);

struct Lemma5Result {
    std::vector<double> direct;          // v_n = eps_n + mu_n sum_{j<n} a_{n-j} b_j v_j
    std::vector<double> representation;  // v_n = sum_j a^{(mu,b)^j}_{n+1-j} eps_j
    double gap = 0.0;
};

Lemma5Result lemma5_recursion(std::span<const double> mu, std::span<const double> a,
                              std::span<const double> b, std::span<const double> epsilon, int n);

struct ConvolutionPowers {
    std::vector<std::vector<double>> powers;  // powers[m - 1][k - 1] = a^{*m}_k
    std::vector<double> sup_change;           // sup_k |a^{*(m+1)}_k - a^{*m}_k|
};

ConvolutionPowers convolution_powers(std::span<const double> a_bar, int m_max, int k_max);

// Limit profile used by the bound: x_1 = a_1, x_k = sum_{l<k} a_{k+1-l} x_l / (1 - a_1).
// The plain iterates lose their mass to ever larger k whenever a_1 < 1.
std::vector<double> renewal_limit(std::span<const double> a_bar, int k_max);

struct BoundSequences {
    std::vector<double> eps_bar;  // b_n * eps_n
    std::vector<double> r;        // 1 - mu_j
    std::vector<double> a_star;   // limit profile of the normalised return tails
};

// eps_n = e1 a_n + sum_{j<n} a_{n-j} E[M_j]; a_bar = a / sum(a).
BoundSequences make_bound_sequences(std::span<const double> a, std::span<const double> mu,
                                    std::span<const double> b, double e1,
                                    std::span<const double> expected_M, int n_max);

// sum over l + j + i = n (all >= 1) of eps_bar_j * mu_bar^n_l * a_star_i, with
// mu_bar^n_l = exp(-sum_{i=n-l+1..n} r_i).
double theorem1_bound(const BoundSequences& s, double B_prime, int n);

// Return-time tails a_j = P[tau >= j] of a two-state chain switching with probability p.
std::vector<double> two_state_return_tails(double p, int len);

struct TwoStateChain {
    double switch_p = 0.3;
    double gamma = 0.2;   // constant RL rate
    double sigma = 1.0;   // sample noise, L = B = 1, v = sigma^2
    double delta0 = 1.0;  // initial offset at the tracked state
};

struct Theorem1Check {
    std::vector<double> simulated;  // E_0[e^n(z1)], n = 1..N
    std::vector<double> standard_error;
    std::vector<double> bound;      // B' times the sum; 0 where the sum is empty
    double B_prime = 0.0;
    int calibration_horizon = 0;
    int first_violation = -1;       // smallest n with bound < simulated, -1 if none
    double B_prime_required = 0.0;  // smallest B' dominating every n >= 3
};

Theorem1Check check_theorem1_two_state(const TwoStateChain& chain, int horizon, int replications,
                                       int calibration_horizon, Rng& rng);

// One-step contraction on m = q - x, x ~ N(q*, sigma^2), with L = B = 1.
struct SyntheticQuadratic {
    double q_star = 0.0;
    double sigma = 1.0;
    double q = 1.0;
};

struct ContractionSetup {
    Algorithm algorithm = Algorithm::rl;
    double gamma = 0.1;  // base rate
    // SAGA: iterate value at write time and sample for each slot; analysis constant c.
    std::vector<double> slot_q;
    std::vector<double> slot_x;
    double saga_c = 1.0;
    // PASS: adapted rate and residual from the previous visit.
    double gamma_hat_prev = 0.1;
    double last_residual = 1.0;
    HlScheme scheme = HlScheme::additive;
    double r1 = 3.0;
};

struct ContractionReport {
    double e_k = 0.0;
    double mc_mean = 0.0;
    double mc_standard_error = 0.0;
    double alpha = 0.0;
    double M = 0.0;
    double bound = 0.0;
    double c_k = 1.0;
    bool violated = false;  // mc_mean > bound + 3 standard errors
};

ContractionReport prop5_contraction_check(const SyntheticQuadratic& problem,
                                          const ContractionSetup& setup, std::int64_t replications,
                                          Rng& rng);

// Model recursion for the upper level: e' = alpha(g) e + M(g) + S on a visit with
// alpha(g) = 1 - 2 L g + B g^2 and M(g) = B (2 + v) g^2, kept inside [0, x2].
struct ErrorModel {
    double L = 1.0;
    double B = 1.0;
    double v = 0.0;

    double x2() const;  // infinity when B >= L^2
    double one_step(double e, double gamma, double S) const;
    // The greedy rate and the value it reaches, g(e) = e - L^2 e^2 / (B (e + 2 + v)).
    double greedy_gamma(double e) const;
    double greedy_value(double e) const;
};

}  // namespace sastep
