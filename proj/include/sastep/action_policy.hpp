#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sastep/random.hpp"

namespace sastep {

enum class ActionPolicyMode { explore_softmax, boltzmann, epsilon_uniform };

struct ActionPolicySettings {
    ActionPolicyMode mode = ActionPolicyMode::explore_softmax;
    double beta_bar = 5.0;
    double b_unvisited = 1.0;
    double epsilon = 0.1;  // epsilon_uniform only
};

// What the policy may look at for the state an action leads to.
struct ActionCandidate {
    double q_value = 0.0;
    double last_abs_residual = 0.0;
    bool visited = false;
};

// Numerically stable softmax.
std::vector<double> softmax(std::span<const double> weights);

std::vector<double> action_probabilities(const ActionPolicySettings& settings,
                                         std::span<const ActionCandidate> candidates);

// Inverse-CDF draw from a normalised distribution.
std::size_t sample_index(std::span<const double> probabilities, Rng& rng);

std::size_t sample_action(const ActionPolicySettings& settings,
                          std::span<const ActionCandidate> candidates, Rng& rng);

}  // namespace sastep
