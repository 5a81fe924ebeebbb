#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sastep/algorithms.hpp"
#include "sastep/iterate_table.hpp"
#include "sastep/random.hpp"
#include "sastep/stepsize.hpp"

namespace sastep {

struct EngineConfig {
    Algorithm algorithm = Algorithm::pass;
    StepSizeConfig stepsize;
    HlScheme hl = HlScheme::additive;
    int saga_depth = 5;
    double initial_value = 0.0;
};

// One learner: iterate table plus whatever state its algorithm needs, with the
// vector E_past of last residuals used for the episode error norm.
class Engine {
public:
    Engine(std::size_t n_states, const EngineConfig& config);

    StepReport update(StateIndex z, double residual, Rng& rng);

    // Full-vector update; only meaningful for pass_vec, other algorithms apply
    // their scalar rule coordinate by coordinate in index order.
    std::vector<StepReport> update_vector(std::span<const double> residuals,
                                          std::span<const char> support, Rng& rng);

    // Closes the episode: feeds ||E_past||_2 to the step-size policy.
    double end_episode();

    const EngineConfig& config() const { return config_; }
    const IterateTable& table() const { return table_; }
    IterateTable& table() { return table_; }
    const StepSizePolicy& policy() const { return policy_; }
    const std::optional<SagaMemory>& saga_memory() const { return memory_; }
    const std::optional<PassState>& pass_state() const { return pass_; }
    std::span<const double> last_residuals() const { return last_residual_; }
    double episode_error_norm() const;

    std::int64_t steps() const { return step_; }
    std::int64_t episodes() const { return episode_; }

private:
    EngineConfig config_;
    IterateTable table_;
    StepSizePolicy policy_;
    std::optional<SagaMemory> memory_;
    std::optional<PassState> pass_;
    std::vector<double> last_residual_;
    std::int64_t step_ = 0;
    std::int64_t episode_ = 0;
};

}  // namespace sastep
