#pragma once

#include <vector>

#include "sastep/engine.hpp"
#include "sastep/iterate_table.hpp"
#include "sastep/random.hpp"

namespace sastep {

// S_{t+1} - S_t = f_{t+1} + sigma * W. State t in {0..n_max-1} estimates f_{t+1}.
struct DriftModel {
    std::vector<double> f{1.0, -1.0, 2.0};
    double noise_sigma = 0.5;

    std::size_t n_states() const { return f.size(); }
    void validate() const;
};

class DriftOracle : public ResidualOracle {
public:
    explicit DriftOracle(DriftModel model) : model_(std::move(model)) {}
    double sample_increment(StateIndex t, Rng& rng) const;
    double residual(const IterateTable& table, StateIndex t, Rng& rng) const override;

private:
    DriftModel model_;
};

struct DriftEpisode {
    std::vector<double> increments;
    double error_norm = 0.0;
};

// One pass t = 0..n_max-1. pass_vec receives the whole residual vector once the
// path is observed; the other algorithms update state by state.
DriftEpisode drift_episode(const DriftModel& model, Engine& engine, Rng& rng);

}  // namespace sastep
