#include "sastep/action_policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sastep {

std::vector<double> softmax(std::span<const double> weights) {
    if (weights.empty()) throw std::invalid_argument("softmax: no weights");
    const double top = *std::max_element(weights.begin(), weights.end());
    std::vector<double> p(weights.size());
    double total = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        p[i] = std::exp(weights[i] - top);
        total += p[i];
    }
    for (double& x : p) x /= total;
    return p;
}

std::vector<double> action_probabilities(const ActionPolicySettings& settings,
                                         std::span<const ActionCandidate> candidates) {
    if (candidates.empty()) throw std::invalid_argument("no candidate actions");
    std::vector<double> w(candidates.size());
    switch (settings.mode) {
        case ActionPolicyMode::explore_softmax:
            for (std::size_t i = 0; i < w.size(); ++i) {
                const auto& c = candidates[i];
                w[i] = settings.beta_bar * (c.visited ? c.last_abs_residual : settings.b_unvisited);
            }
            return softmax(w);
        case ActionPolicyMode::boltzmann:
            for (std::size_t i = 0; i < w.size(); ++i)
                w[i] = settings.beta_bar * candidates[i].q_value;
            return softmax(w);
        case ActionPolicyMode::epsilon_uniform: {
            std::size_t best = 0;
            for (std::size_t i = 1; i < w.size(); ++i)
                if (candidates[i].q_value > candidates[best].q_value) best = i;
            const double share = settings.epsilon / static_cast<double>(w.size());
            std::fill(w.begin(), w.end(), share);
            w[best] += 1.0 - settings.epsilon;
            return w;
        }
    }
    return w;
}

std::size_t sample_index(std::span<const double> probabilities, Rng& rng) {
    if (probabilities.empty()) throw std::invalid_argument("empty distribution");
    const double u = uniform01(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        acc += probabilities[i];
        if (u < acc) return i;
    }
    // Rounding left a sliver above the last cumulative value.
    for (std::size_t i = probabilities.size(); i-- > 0;)
        if (probabilities[i] > 0.0) return i;
    return probabilities.size() - 1;
}

std::size_t sample_action(const ActionPolicySettings& settings,
                          std::span<const ActionCandidate> candidates, Rng& rng) {
    const auto p = action_probabilities(settings, candidates);
    return sample_index(p, rng);
}

}  // namespace sastep
