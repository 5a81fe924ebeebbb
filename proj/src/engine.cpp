#include "sastep/engine.hpp"

#include <cmath>
#include <stdexcept>

namespace sastep {

Engine::Engine(std::size_t n_states, const EngineConfig& config)
    : config_(config),
      table_(n_states, config.initial_value),
      policy_(config.stepsize, n_states),
      last_residual_(n_states, 0.0) {
    if (config_.algorithm == Algorithm::saga) memory_.emplace(n_states, config_.saga_depth, 0.0, config_.initial_value);
    if (config_.algorithm == Algorithm::pass || config_.algorithm == Algorithm::pass_vec)
        pass_.emplace(n_states, config_.hl);
}

StepReport Engine::update(StateIndex z, double residual, Rng& rng) {
    const Transition t{z, residual, step_, episode_};
    StepReport report;
    switch (config_.algorithm) {
        case Algorithm::rl:
            report = step_rl(table_, policy_, t);
            break;
        case Algorithm::saga:
            report = step_saga(table_, *memory_, policy_, t, rng);
            break;
        case Algorithm::pass:
            report = step_pass(table_, *pass_, policy_, t);
            break;
        case Algorithm::pass_vec: {
            std::vector<double> m(table_.size(), 0.0);
            std::vector<char> support(table_.size(), 0);
            m.at(z) = residual;
            support[z] = 1;
            report = step_pass_vectorial(table_, *pass_, policy_, m, support, step_).front();
            break;
        }
    }
    last_residual_[z] = residual;
    ++step_;
    return report;
}

std::vector<StepReport> Engine::update_vector(std::span<const double> residuals,
                                              std::span<const char> support, Rng& rng) {
    if (residuals.size() != table_.size() || support.size() != table_.size())
        throw std::invalid_argument("update_vector: dimension mismatch");
    std::vector<StepReport> reports;
    if (config_.algorithm == Algorithm::pass_vec) {
        reports = step_pass_vectorial(table_, *pass_, policy_, residuals, support, step_);
        for (const auto& r : reports) last_residual_[r.state] = r.residual;
        ++step_;
        return reports;
    }
    for (std::size_t z = 0; z < residuals.size(); ++z)
        if (support[z]) reports.push_back(update(z, residuals[z], rng));
    return reports;
}

double Engine::episode_error_norm() const {
    double s = 0.0;
    for (double m : last_residual_) s += m * m;
    return std::sqrt(s);
}

double Engine::end_episode() {
    const double norm = episode_error_norm();
    policy_.end_episode(norm);
    ++episode_;
    return norm;
}

}  // namespace sastep
