#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sastep/drift.hpp"
#include "sastep/execution.hpp"
#include "sastep/placement.hpp"

namespace sastep {

struct ReferenceTable {
    std::vector<double> values;
    std::vector<int> control;  // one entry per decision cell; empty when not applicable
};

ReferenceTable solve_drift_reference(const DriftModel& model);

// Finite-horizon optimal stopping (minimisation) on an explicit kernel.
// rows[s] lists the outcomes of waiting one step in state s.
struct StoppingOutcome {
    double probability = 0.0;
    std::optional<std::size_t> next;  // empty: episode ends with `payoff`
    double payoff = 0.0;
};

struct StoppingProblem {
    std::size_t n_states = 0;
    int horizon = 1;
    double stop_cost = 0.0;           // paid when stopping, also forced at the horizon
    double wait_cost = 0.0;           // paid per waiting step
    std::vector<std::vector<StoppingOutcome>> rows;
};

// values laid out as (t, s, action) with action 0 = stop, 1 = wait; control per
// (t, s), ties resolved to stop.
ReferenceTable solve_stopping(const StoppingProblem& problem);

// Brute force over every deterministic policy; only for tiny problems.
std::vector<double> enumerate_stopping_values(const StoppingProblem& problem);

// Same layout as PlacementIndex: values at (t, cell, action), control per cell.
ReferenceTable solve_placement_reference(const LobModel& model);

// Largest |q*(s, a) - (one-step target)| over all states.
double placement_bellman_residual(const LobModel& model, const ReferenceTable& ref);

// sup E recursion v_bar over the grid moves: v(k_T, q) = -A q^2 and
// v(t, q) = max_j E[M](nu_j, q) - phi Delta q^2 + v(t + 1, q_j).
ReferenceTable solve_execution_reference(const ExecModel& model);

// Fixed point of the sampled scheme: v(t, q) = E[max_j {M(nu_j) + v(t + 1, q_j)}] - phi Delta q^2,
// the expectation taken exactly over the Gaussian law of the price pair.
ReferenceTable solve_execution_reference_esup(const ExecModel& model);

// E[max_j (slope_j Y + intercept_j)] for Y ~ N(mean, sd^2), via the upper envelope.
double expected_max_of_lines(std::span<const double> slopes, std::span<const double> intercepts,
                             double mean, double sd);

double execution_bellman_residual(const ExecModel& model, const ReferenceTable& ref, bool esup);

// Monte-Carlo E[sup_nu M] - sup_nu E[M] for one step with unconstrained nu.
struct SupGapEstimate {
    double gap = 0.0;
    double standard_error = 0.0;
    double predicted = 0.0;  // sigma^2 Delta^2 / (12 kappa)
};

SupGapEstimate empirical_sup_gap(double alpha, double sigma, double delta, double kappa,
                                 double q, std::int64_t draws, Rng& rng);

double sup_expected_gain(double alpha, double delta, double kappa, double q);

// sum_z w_z (q(z) - q*(z))^2; uniform weights 1/|Z| when `weights` is empty.
double l2_gap(std::span<const double> values, std::span<const double> reference,
              std::span<const double> weights = {});

// SAGA error: adds the memory spread (1/M) sum_j (slot_j - m*(z, j))^2 and scales
// the iterate gap by the analysis constant c. m_star holds one entry per slot,
// laid out like the memory (z * M + j).
double l2_gap_saga(std::span<const double> values, std::span<const double> reference,
                   const SagaMemory& memory, std::span<const double> m_star, double c,
                   std::span<const double> weights = {});

// m*(z, j) evaluated on the sample stored in slot j: slot - anchor + q*(z). Exact
// when H does not depend on q (drift); a same-sample proxy otherwise.
std::vector<double> saga_same_sample_m_star(const SagaMemory& memory,
                                            std::span<const double> reference);

}  // namespace sastep
