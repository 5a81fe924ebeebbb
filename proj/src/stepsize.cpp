#include "sastep/stepsize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sastep {

namespace {

void check_base(double gamma_hat, double gamma_base) {
    if (!(gamma_base > 0.0)) throw std::invalid_argument("gamma_base must be positive");
    if (gamma_hat < 0.0) throw std::invalid_argument("gamma_hat must be non-negative");
}

}  // namespace

double h_increase(double gamma_hat, double gamma_base, HlScheme scheme) {
    check_base(gamma_hat, gamma_base);
    const double cap = 3.0 * gamma_base;
    if (scheme == HlScheme::additive)
        return std::max(std::min(gamma_hat + gamma_base, cap), gamma_base);
    return std::max(std::min(gamma_hat + 2.0 / 3.0 * gamma_base, cap), gamma_base);
}

double l_decrease(double gamma_hat, double gamma_base, HlScheme scheme) {
    check_base(gamma_hat, gamma_base);
    const double cap = 3.0 * gamma_base;
    const double step = scheme == HlScheme::additive ? gamma_base : 2.0 / 3.0 * gamma_base;
    // The cap only matters when the base dropped since the last visit.
    return std::min(std::max(gamma_hat - step, gamma_base), cap);
}

PcPolicy::PcPolicy(double gamma0, PcSettings settings) : gamma_(gamma0), settings_(settings) {
    if (settings_.window < 1) throw std::invalid_argument("pc window must be >= 1");
    if (!(settings_.improvement > 0.0 && settings_.improvement < 1.0))
        throw std::invalid_argument("pc improvement must lie in (0, 1)");
    if (!(settings_.floor > 0.0)) throw std::invalid_argument("pc floor must be positive");
    gamma_ = std::max(gamma_, settings_.floor);
}

bool PcPolicy::update(double episode_error_norm) {
    sum_ += episode_error_norm;
    if (++count_ < settings_.window) return false;

    const double mean = sum_ / settings_.window;
    sum_ = 0.0;
    count_ = 0;
    if (last_mean_ && !(mean <= (1.0 - settings_.improvement) * *last_mean_)) {
        if (settings_.mode == PcMode::halve)
            gamma_ = std::max(gamma_ / 2.0, settings_.floor);
        else
            gamma_ = std::max(gamma_ - settings_.decrement, settings_.floor);
    }
    prev_mean_ = last_mean_;
    last_mean_ = mean;
    return true;
}

double optimal_gamma_rl(double e_proxy, double L, double B, double v) {
    return optimal_gamma_pass(e_proxy, L, B, 1.0, 0.0, v);
}

double optimal_gamma_pass(double e_proxy, double L, double B, double c, double d1, double v) {
    if (e_proxy < 0.0 || v < 0.0 || c < 0.0 || d1 < 0.0)
        throw std::invalid_argument("optimal gamma: negative input");
    if (!(L > 0.0) || L > B) throw std::invalid_argument("optimal gamma: need 0 < L <= B");
    if (e_proxy == 0.0) return 0.0;
    const double amplification = (c >= 1.0 ? d1 / B : 0.0) + c * c * (2.0 + v);
    return L / B * e_proxy / (e_proxy + amplification);
}

LbEstimate adapt_lb(LbEstimate est, bool error_increased) {
    if (error_increased) {
        est.B *= est.kappa_up;
        est.L /= est.kappa_up;
    }
    return est;
}

ErrorProxy::ErrorProxy(std::size_t n_states, int window, ProxyMode mode)
    : windows_(n_states), window_(window), mode_(mode) {
    if (window < 1) throw std::invalid_argument("proxy window must be >= 1");
}

void ErrorProxy::push(StateIndex z, double residual) {
    auto& w = windows_.at(z);
    w.push_back(residual);
    if (static_cast<int>(w.size()) > window_) w.pop_front();
}

double ErrorProxy::e(StateIndex z) const {
    const auto& w = windows_.at(z);
    if (w.empty()) return 0.0;
    double s = 0.0;
    if (mode_ == ProxyMode::mean_square) {
        for (double x : w) s += x * x;
        return s / static_cast<double>(w.size());
    }
    for (double x : w) s += x;
    const double mean = s / static_cast<double>(w.size());
    return mean * mean;
}

double ErrorProxy::v(StateIndex z) const {
    const auto& w = windows_.at(z);
    if (w.size() < 2) return 0.0;
    double s = 0.0;
    for (double x : w) s += x;
    const double mean = s / static_cast<double>(w.size());
    double ss = 0.0;
    for (double x : w) ss += (x - mean) * (x - mean);
    return ss / static_cast<double>(w.size() - 1);
}

StepSizePolicy::StepSizePolicy(const StepSizeConfig& config, std::size_t n_states)
    : config_(config),
      pc_(config.gamma0, config.pc),
      lb_(config.lb),
      proxy_(n_states, config.proxy_window, config.proxy_mode) {
    if (!(config_.gamma0 > 0.0)) throw std::invalid_argument("gamma0 must be positive");
    if (!(config_.eta > 0.0)) throw std::invalid_argument("eta must be positive");
    if (!(config_.alpha_exponent > 0.0 && config_.alpha_exponent <= 1.0))
        throw std::invalid_argument("alpha exponent must lie in (0, 1]");
    if (!(lb_.L > 0.0) || lb_.L > lb_.B) throw std::invalid_argument("need 0 < L <= B");
    if (!(lb_.kappa_up >= 1.0)) throw std::invalid_argument("kappa_up must be >= 1");
}

double StepSizePolicy::base(StateIndex z, std::uint64_t n, double c) const {
    switch (config_.kind) {
        case ScheduleKind::constant:
            return config_.gamma0;
        case ScheduleKind::inverse_power:
            return config_.eta / std::pow(static_cast<double>(std::max<std::uint64_t>(n, 1)),
                                          config_.alpha_exponent);
        case ScheduleKind::piecewise_constant:
            return pc_.gamma();
        case ScheduleKind::optimal:
            return optimal_gamma_pass(proxy_.e(z), lb_.L, lb_.B, c, config_.d1, proxy_.v(z));
    }
    return config_.gamma0;
}

void StepSizePolicy::observe_residual(StateIndex z, double residual) {
    if (config_.kind == ScheduleKind::optimal) proxy_.push(z, residual);
}

void StepSizePolicy::end_episode(double episode_error_norm) {
    if (!pc_.update(episode_error_norm)) return;
    if (config_.kind != ScheduleKind::optimal) return;
    const auto cur = pc_.last_window_mean();
    const auto prev = pc_.previous_window_mean();
    if (cur && prev) lb_ = adapt_lb(lb_, *cur > *prev);
}

}  // namespace sastep
