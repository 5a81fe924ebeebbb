#include "sastep/placement.hpp"

#include <algorithm>
#include <stdexcept>

#include "sastep/action_policy.hpp"

namespace sastep {

void LobModel::validate() const {
    if (grid.q_before_max < 0 || grid.q_after_max < 0 || grid.q_opp_max < 1)
        throw std::invalid_argument("lob: bad grid maxima");
    if (costs.horizon_T < 1) throw std::invalid_argument("lob: horizon must be >= 1");
    if (costs.spread_psi < 0.0 || costs.wait_cost_c < 0.0 || costs.tick < 0.0)
        throw std::invalid_argument("lob: costs must be non-negative");
    const double p[] = {rates.market_sell, rates.same_arrival, rates.same_cancel,
                        rates.opp_arrival, rates.opp_depletion};
    double total = 0.0;
    for (double x : p) {
        if (x < 0.0) throw std::invalid_argument("lob: negative event probability");
        total += x;
    }
    if (total > 1.0 + 1e-12) throw std::invalid_argument("lob: event probabilities exceed 1");
}

std::vector<LobBranch> lob_kernel(const LobModel& model, const LobState& s) {
    if (s.terminal()) throw std::invalid_argument("lob_kernel: terminal state");
    const auto& g = model.grid;
    const auto& r = model.rates;
    const double psi = model.costs.spread_psi;
    std::vector<LobBranch> out;

    if (s.q_before == 0) {
        LobState n = s;
        n.executed = true;
        out.push_back({r.market_sell, n, 0.0});
    } else {
        LobState n = s;
        --n.q_before;
        out.push_back({r.market_sell, n, std::nullopt});
    }

    {
        LobState n = s;
        n.q_after = std::min(n.q_after + 1, g.q_after_max);
        out.push_back({r.same_arrival, n, std::nullopt});
    }

    const int same = s.q_before + s.q_after;
    if (same == 0) {
        out.push_back({r.same_cancel, s, std::nullopt});
    } else {
        if (s.q_before > 0) {
            LobState n = s;
            --n.q_before;
            out.push_back({r.same_cancel * s.q_before / same, n, std::nullopt});
        }
        if (s.q_after > 0) {
            LobState n = s;
            --n.q_after;
            out.push_back({r.same_cancel * s.q_after / same, n, std::nullopt});
        }
    }

    {
        LobState n = s;
        n.q_opp = std::min(n.q_opp + 1, g.q_opp_max);
        out.push_back({r.opp_arrival, n, std::nullopt});
    }

    if (s.q_opp <= 1) {
        LobState n = s;
        n.q_opp = 0;
        n.price_moved = true;
        out.push_back({r.opp_depletion, n, psi + model.costs.tick});
    } else {
        LobState n = s;
        --n.q_opp;
        out.push_back({r.opp_depletion, n, std::nullopt});
    }

    const double rest = 1.0 - r.market_sell - r.same_arrival - r.same_cancel - r.opp_arrival -
                        r.opp_depletion;
    out.push_back({rest, s, std::nullopt});
    return out;
}

LobStep lob_transition(const LobModel& model, const LobState& state, int action, Rng& rng) {
    if (action != 0 && action != 1) throw std::invalid_argument("lob: action must be 0 or 1");
    if (action == static_cast<int>(LobAction::cross)) return {state, model.costs.spread_psi, 0.0};
    const auto branches = lob_kernel(model, state);
    std::vector<double> p;
    p.reserve(branches.size());
    for (const auto& b : branches) p.push_back(b.probability);
    const auto& b = branches[sample_index(p, rng)];
    return {b.next, b.payoff, model.costs.wait_cost_c};
}

PlacementIndex::PlacementIndex(const LobModel& model)
    : T_(model.costs.horizon_T),
      nb_(model.grid.q_before_max + 1),
      na_(model.grid.q_after_max + 1),
      no_(model.grid.q_opp_max),
      n_(static_cast<std::size_t>(T_) * nb_ * na_ * no_ * 2) {}

std::size_t PlacementIndex::cell(int t, const LobState& s) const {
    if (t < 0 || t >= T_ || s.q_before < 0 || s.q_before >= nb_ || s.q_after < 0 ||
        s.q_after >= na_ || s.q_opp < 1 || s.q_opp > no_)
        throw std::out_of_range("placement state outside grid");
    return ((static_cast<std::size_t>(t) * nb_ + s.q_before) * na_ + s.q_after) * no_ +
           (s.q_opp - 1);
}

StateIndex PlacementIndex::encode(int t, const LobState& s, LobAction a) const {
    return cell(t, s) * 2 + static_cast<std::size_t>(a);
}

std::pair<int, LobState> PlacementIndex::decode_cell(std::size_t c) const {
    if (c >= n_cells()) throw std::out_of_range("placement cell outside grid");
    LobState s;
    s.q_opp = static_cast<int>(c % no_) + 1;
    c /= no_;
    s.q_after = static_cast<int>(c % na_);
    c /= na_;
    s.q_before = static_cast<int>(c % nb_);
    return {static_cast<int>(c / nb_), s};
}

double placement_residual(const LobModel& model, const PlacementIndex& index,
                          const IterateTable& q, int t, const LobState& state, LobAction action,
                          const LobStep& next) {
    const double current = q.value(index.encode(t, state, action));
    if (action == LobAction::cross) return current - model.costs.spread_psi;
    double continuation;
    if (next.payoff)
        continuation = *next.payoff;
    else if (t + 1 >= index.horizon())
        continuation = model.costs.spread_psi;
    else
        continuation = std::min(q.value(index.encode(t + 1, next.next, LobAction::cross)),
                                q.value(index.encode(t + 1, next.next, LobAction::stay)));
    return current - (model.costs.wait_cost_c + continuation);
}

PlacementEpisode placement_episode(const LobModel& model, const PlacementIndex& index,
                                   Engine& engine, Rng& rng) {
    LobState s;
    s.q_before = static_cast<int>(uniform_index(rng, model.grid.q_before_max + 1));
    s.q_after = static_cast<int>(uniform_index(rng, model.grid.q_after_max + 1));
    s.q_opp = static_cast<int>(uniform_index(rng, model.grid.q_opp_max)) + 1;

    PlacementEpisode ep;
    for (int t = 0; t < index.horizon(); ++t) {
        const LobStep next = lob_transition(model, s, static_cast<int>(LobAction::stay), rng);
        for (LobAction a : {LobAction::cross, LobAction::stay}) {
            const double m = placement_residual(model, index, engine.table(), t, s, a, next);
            engine.update(index.encode(t, s, a), m, rng);
        }
        ++ep.steps;
        if (next.payoff) break;
        s = next.next;
    }
    ep.error_norm = engine.end_episode();
    return ep;
}

std::vector<int> learned_control(const PlacementIndex& index, const IterateTable& q) {
    std::vector<int> control(index.n_cells());
    for (std::size_t c = 0; c < control.size(); ++c)
        control[c] = q.value(2 * c + 1) < q.value(2 * c) ? 1 : 0;
    return control;
}

}  // namespace sastep
