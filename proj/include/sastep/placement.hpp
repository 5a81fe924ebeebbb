#pragma once

#include <optional>
#include <vector>

#include "sastep/engine.hpp"
#include "sastep/iterate_table.hpp"
#include "sastep/random.hpp"

namespace sastep {

// Discrete-time book seen from a unit buy limit order resting at the bid.
// Prices are relative to the bid at placement, so a fill costs 0, crossing
// costs psi and a depleted ask queue moves the price up by one tick, after which
// the order is given up and the agent crosses at psi + tick.
struct LobState {
    int q_before = 0;  // shares ahead of our order
    int q_after = 0;   // shares behind it
    int q_opp = 1;     // ask queue
    bool price_moved = false;
    bool executed = false;

    bool terminal() const { return price_moved || executed; }
    bool operator==(const LobState&) const = default;
};

struct LobGrid {
    int q_before_max = 3;
    int q_after_max = 3;
    int q_opp_max = 2;
};

// Per-step event probabilities; the remaining mass is "no event".
struct LobEventRates {
    double market_sell = 0.25;    // consumes the front of the bid queue
    double same_arrival = 0.15;   // joins the bid queue behind us
    double same_cancel = 0.15;    // leaves the bid queue, ahead or behind uniformly per share
    double opp_arrival = 0.15;
    double opp_depletion = 0.10;  // cancel or buy at the ask
};

struct LobCosts {
    double spread_psi = 1.0;
    double wait_cost_c = 0.1;
    int horizon_T = 3;
    double tick = 1.0;
};

struct LobModel {
    LobGrid grid;
    LobEventRates rates;
    LobCosts costs;

    void validate() const;
};

enum class LobAction { cross = 0, stay = 1 };

struct LobBranch {
    double probability = 0.0;
    LobState next;
    std::optional<double> payoff;  // set when the branch ends the episode
};

// Exact one-step kernel under "stay". Branches with identical outcomes are
// not merged.
std::vector<LobBranch> lob_kernel(const LobModel& model, const LobState& state);

struct LobStep {
    LobState next;
    std::optional<double> payoff;
    double running_cost = 0.0;
};

LobStep lob_transition(const LobModel& model, const LobState& state, int action, Rng& rng);

// Learner layout: (t, q_before, q_after, q_opp in 1..max, action).
class PlacementIndex {
public:
    explicit PlacementIndex(const LobModel& model);

    std::size_t n_states() const { return n_; }
    std::size_t n_cells() const { return n_ / 2; }
    StateIndex encode(int t, const LobState& s, LobAction a) const;
    std::size_t cell(int t, const LobState& s) const;
    int horizon() const { return T_; }
    // Decodes a cell index back to (t, state).
    std::pair<int, LobState> decode_cell(std::size_t cell) const;

private:
    int T_, nb_, na_, no_;
    std::size_t n_;
};

// m^a = q(t, s, a) - target. Cross: target psi. Stay: c plus the payoff, the
// forced cross at the horizon, or min_a' q(t + 1, next, a').
double placement_residual(const LobModel& model, const PlacementIndex& index,
                          const IterateTable& q, int t, const LobState& state, LobAction action,
                          const LobStep& next);

struct PlacementEpisode {
    int steps = 0;
    double error_norm = 0.0;
};

// The agent always stays; both actions at the current state are updated from
// the same observed transition. The start state is uniform over the grid.
PlacementEpisode placement_episode(const LobModel& model, const PlacementIndex& index,
                                   Engine& engine, Rng& rng);

// 1 when the learner prefers to stay, 0 for cross (ties go to cross).
std::vector<int> learned_control(const PlacementIndex& index, const IterateTable& q);

}  // namespace sastep
