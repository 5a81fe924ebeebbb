#include "sastep/drift.hpp"

#include <cmath>
#include <stdexcept>

namespace sastep {

void DriftModel::validate() const {
    if (f.empty()) throw std::invalid_argument("drift: n_max must be positive");
    if (!(noise_sigma >= 0.0)) throw std::invalid_argument("drift: noise_sigma must be >= 0");
    for (double x : f)
        if (!std::isfinite(x)) throw std::invalid_argument("drift: non-finite f");
}

double DriftOracle::sample_increment(StateIndex t, Rng& rng) const {
    return model_.f.at(t) + model_.noise_sigma * standard_normal(rng);
}

double DriftOracle::residual(const IterateTable& table, StateIndex t, Rng& rng) const {
    return table.value(t) - sample_increment(t, rng);
}

DriftEpisode drift_episode(const DriftModel& model, Engine& engine, Rng& rng) {
    const std::size_t n = model.n_states();
    if (engine.table().size() != n) throw std::invalid_argument("drift: engine size mismatch");
    const DriftOracle oracle(model);
    DriftEpisode ep;
    ep.increments.resize(n);

    if (engine.config().algorithm == Algorithm::pass_vec) {
        std::vector<double> m(n);
        for (std::size_t t = 0; t < n; ++t) {
            ep.increments[t] = oracle.sample_increment(t, rng);
            m[t] = engine.table().value(t) - ep.increments[t];
        }
        const std::vector<char> support(n, 1);
        engine.update_vector(m, support, rng);
    } else {
        for (std::size_t t = 0; t < n; ++t) {
            ep.increments[t] = oracle.sample_increment(t, rng);
            engine.update(t, engine.table().value(t) - ep.increments[t], rng);
        }
    }
    ep.error_norm = engine.end_episode();
    return ep;
}

}  // namespace sastep
