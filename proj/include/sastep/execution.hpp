#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "sastep/action_policy.hpp"
#include "sastep/engine.hpp"
#include "sastep/iterate_table.hpp"
#include "sastep/random.hpp"

namespace sastep {

// Liquidation of an inventory on a (t, q) grid. Mid price dS = alpha dt + sigma dW,
// trading speed nu moves inventory by nu * Delta per step.
struct ExecModel {
    double alpha = 0.1;
    double sigma = 1.0;
    double kappa = 0.1;
    double phi = 0.1;
    double A_terminal = 1.0;
    double T = 1.0;
    int k_T = 10;
    int k_q = 10;
    double q_bar = 1.0;

    double delta() const { return T / k_T; }
    double inventory(int n_q) const { return -q_bar + 2.0 * n_q * q_bar / k_q; }
    // Speed that moves inventory from grid point i to grid point j in one step.
    double speed(int i, int j) const { return (inventory(j) - inventory(i)) / delta(); }
    std::size_t n_states() const { return static_cast<std::size_t>(k_T + 1) * (k_q + 1); }
    StateIndex index(int n_t, int n_q) const {
        return static_cast<StateIndex>(n_t) * (k_q + 1) + static_cast<StateIndex>(n_q);
    }
    void validate() const;
};

// Price increment over one step and its time integral relative to the start,
// sampled as the exact joint Gaussian pair.
struct PriceIncrement {
    double dS = 0.0;
    double dS_bar = 0.0;
};

PriceIncrement sample_increment(const ExecModel& model, Rng& rng);

// One-step gain M = -nu dS_bar - kappa nu^2 Delta + q dS + nu Delta dS.
double exec_gain(const ExecModel& model, double q, double nu, const PriceIncrement& inc);

// Expected gain E[M](nu, q) = q alpha Delta + nu alpha Delta^2 / 2 - kappa nu^2 Delta.
double exec_expected_gain(const ExecModel& model, double q, double nu);

// m = -sup_nu { M - phi Delta q^2 + v(t + 1, q') - v(t, q) } over grid moves.
double exec_residual(const ExecModel& model, const IterateTable& v, int n_t, int n_q,
                     const PriceIncrement& inc);

// Writes the terminal row v(k_T, q) = -A q^2.
void init_exec_table(const ExecModel& model, IterateTable& v);

struct ExecRunOptions {
    std::int64_t iterations = 120000;
    std::int64_t cadence = 100;
    ActionPolicySettings policy;
};

// Runs episodes from uniform initial inventories until exactly `iterations`
// updates were made. The callback fires after every `cadence` updates.
void exec_run(const ExecModel& model, Engine& engine, const ExecRunOptions& options, Rng& rng,
              const std::function<void(std::int64_t step, const IterateTable&)>& on_cadence);

}  // namespace sastep
