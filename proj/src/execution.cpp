#include "sastep/execution.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sastep {

void ExecModel::validate() const {
    if (!(sigma > 0.0) || !(kappa > 0.0) || !(T > 0.0) || !(q_bar > 0.0))
        throw std::invalid_argument("exec: sigma, kappa, T and q_bar must be positive");
    if (phi < 0.0 || A_terminal < 0.0) throw std::invalid_argument("exec: phi and A must be >= 0");
    if (k_T < 1 || k_q < 1) throw std::invalid_argument("exec: grid sizes must be >= 1");
}

PriceIncrement sample_increment(const ExecModel& m, Rng& rng) {
    const double d = m.delta();
    const double z1 = standard_normal(rng);
    const double z2 = standard_normal(rng);
    // Var dS = s^2 d, Var dS_bar = s^2 d^3 / 3, Cov = s^2 d^2 / 2.
    const double sd = m.sigma * std::sqrt(d);
    PriceIncrement inc;
    inc.dS = m.alpha * d + sd * z1;
    inc.dS_bar = m.alpha * d * d / 2.0 + m.sigma * d * std::sqrt(d) * (z1 / 2.0 + z2 / std::sqrt(12.0));
    return inc;
}

double exec_gain(const ExecModel& m, double q, double nu, const PriceIncrement& inc) {
    const double d = m.delta();
    return -nu * inc.dS_bar - m.kappa * nu * nu * d + q * inc.dS + nu * d * inc.dS;
}

double exec_expected_gain(const ExecModel& m, double q, double nu) {
    const double d = m.delta();
    return q * m.alpha * d + nu * m.alpha * d * d / 2.0 - m.kappa * nu * nu * d;
}

double exec_residual(const ExecModel& m, const IterateTable& v, int n_t, int n_q,
                     const PriceIncrement& inc) {
    if (n_t < 0 || n_t >= m.k_T || n_q < 0 || n_q > m.k_q)
        throw std::out_of_range("exec_residual: state outside the learnable grid");
    const double q = m.inventory(n_q);
    const double running = m.phi * m.delta() * q * q;
    const double here = v.value(m.index(n_t, n_q));
    double best = -std::numeric_limits<double>::infinity();
    for (int j = 0; j <= m.k_q; ++j) {
        const double nu = m.speed(n_q, j);
        const double x = exec_gain(m, q, nu, inc) - running + v.value(m.index(n_t + 1, j)) - here;
        best = std::max(best, x);
    }
    if (!std::isfinite(best)) throw std::logic_error("exec_residual: empty admissible set");
    return -best;
}

void init_exec_table(const ExecModel& m, IterateTable& v) {
    for (int j = 0; j <= m.k_q; ++j) {
        const double q = m.inventory(j);
        v.set_value(m.index(m.k_T, j), -m.A_terminal * q * q);
    }
}

void exec_run(const ExecModel& m, Engine& engine, const ExecRunOptions& options, Rng& rng,
              const std::function<void(std::int64_t, const IterateTable&)>& on_cadence) {
    if (engine.table().size() != m.n_states()) throw std::invalid_argument("exec: engine size mismatch");
    if (options.cadence < 1) throw std::invalid_argument("exec: cadence must be >= 1");
    init_exec_table(m, engine.table());

    std::int64_t done = 0;
    std::vector<ActionCandidate> candidates(static_cast<std::size_t>(m.k_q) + 1);
    const auto residuals = engine.last_residuals();
    while (done < options.iterations) {
        int n_q = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(m.k_q) + 1));
        for (int n_t = 0; n_t < m.k_T && done < options.iterations; ++n_t) {
            const PriceIncrement inc = sample_increment(m, rng);
            const StateIndex z = m.index(n_t, n_q);
            engine.update(z, exec_residual(m, engine.table(), n_t, n_q, inc), rng);
            ++done;
            if (on_cadence && done % options.cadence == 0) on_cadence(done, engine.table());

            // Terminal values are exact, so they count as visited with zero residual.
            for (int j = 0; j <= m.k_q; ++j) {
                const StateIndex next = m.index(n_t + 1, j);
                auto& c = candidates[static_cast<std::size_t>(j)];
                c.q_value = engine.table().value(next);
                c.visited = n_t + 1 == m.k_T || engine.table().visits(next) > 0;
                c.last_abs_residual = n_t + 1 == m.k_T ? 0.0 : std::abs(residuals[next]);
            }
            n_q = static_cast<int>(sample_action(options.policy, candidates, rng));
        }
        engine.end_episode();
    }
}

}  // namespace sastep
