#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "sastep/iterate_table.hpp"

namespace sastep {

enum class HlScheme { additive, two_thirds };

// PASS rate adaptors. Both clamp into [gamma_base, 3 * gamma_base].
double h_increase(double gamma_hat, double gamma_base, HlScheme scheme);
double l_decrease(double gamma_hat, double gamma_base, HlScheme scheme);

enum class PcMode { halve, subtract };

struct PcSettings {
    int window = 5;
    double improvement = 0.01;
    double floor = 0.01;
    PcMode mode = PcMode::halve;
    double decrement = 0.01;
};

// Piecewise-constant outer schedule driven by episode error norms.
// Windows of `window` episodes do not overlap; the first window only sets the
// comparison level.
class PcPolicy {
public:
    PcPolicy(double gamma0, PcSettings settings);

    double gamma() const { return gamma_; }
    const PcSettings& settings() const { return settings_; }

    // Returns true when this call closed a window.
    bool update(double episode_error_norm);

    // Mean of the last closed window and of the one before it.
    std::optional<double> last_window_mean() const { return last_mean_; }
    std::optional<double> previous_window_mean() const { return prev_mean_; }

private:
    double gamma_;
    PcSettings settings_;
    double sum_ = 0.0;
    int count_ = 0;
    std::optional<double> last_mean_;
    std::optional<double> prev_mean_;
};

// Greedy minimiser of the one-step model error for the plain update.
double optimal_gamma_rl(double e_proxy, double L, double B, double v);
double optimal_gamma_pass(double e_proxy, double L, double B, double c, double d1, double v);

struct LbEstimate {
    double L = 1.0;
    double B = 1.0;
    double kappa_up = 2.0;
};

LbEstimate adapt_lb(LbEstimate est, bool error_increased);

enum class ProxyMode { squared_mean, mean_square };

// Per-state window of the last p residuals. e is the squared window mean (or
// the mean of squares), v the unbiased window variance.
class ErrorProxy {
public:
    ErrorProxy(std::size_t n_states, int window, ProxyMode mode = ProxyMode::squared_mean);

    void push(StateIndex z, double residual);
    double e(StateIndex z) const;
    double v(StateIndex z) const;
    std::size_t count(StateIndex z) const { return windows_.at(z).size(); }

private:
    std::vector<std::deque<double>> windows_;
    int window_;
    ProxyMode mode_;
};

enum class ScheduleKind { constant, inverse_power, piecewise_constant, optimal };

struct StepSizeConfig {
    ScheduleKind kind = ScheduleKind::constant;
    double gamma0 = 0.5;       // constant rate and PC starting level
    double eta = 1.0;          // inverse_power numerator
    double alpha_exponent = 1.0;
    PcSettings pc;
    LbEstimate lb;
    int proxy_window = 5;
    ProxyMode proxy_mode = ProxyMode::squared_mean;
    double d1 = 0.0;
};

// The outer (base) rate gamma_o(z) seen by every algorithm.
class StepSizePolicy {
public:
    StepSizePolicy(const StepSizeConfig& config, std::size_t n_states);

    const StepSizeConfig& config() const { return config_; }

    // Base rate for the n-th visit of z (n >= 1). For the optimal kind the
    // residual of this visit must already have been passed to observe_residual.
    // c is the PASS amplification ratio; 1 for the other algorithms.
    double base(StateIndex z, std::uint64_t n, double c = 1.0) const;

    void observe_residual(StateIndex z, double residual);
    void end_episode(double episode_error_norm);

    double pc_level() const { return pc_.gamma(); }
    const LbEstimate& lb() const { return lb_; }
    const ErrorProxy& proxy() const { return proxy_; }

private:
    StepSizeConfig config_;
    PcPolicy pc_;
    LbEstimate lb_;
    ErrorProxy proxy_;
};

}  // namespace sastep
