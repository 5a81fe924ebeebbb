#include "sastep/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "sastep/algorithms.hpp"

namespace sastep {

ReferenceTable solve_drift_reference(const DriftModel& model) {
    model.validate();
    return {model.f, {}};
}

namespace {

void check_rows(const StoppingProblem& p) {
    if (p.horizon < 1) throw std::invalid_argument("stopping: horizon must be >= 1");
    if (p.rows.size() != p.n_states) throw std::invalid_argument("stopping: one row per state");
    for (std::size_t s = 0; s < p.rows.size(); ++s) {
        double total = 0.0;
        for (const auto& o : p.rows[s]) {
            if (o.probability < 0.0) throw std::invalid_argument("stopping: negative probability");
            if (o.next && *o.next >= p.n_states)
                throw std::invalid_argument("stopping: successor outside state space");
            total += o.probability;
        }
        if (std::abs(total - 1.0) > 1e-12)
            throw std::invalid_argument("stopping: kernel row " + std::to_string(s) +
                                        " sums to " + std::to_string(total));
    }
}

double wait_value(const StoppingProblem& p, std::size_t s, const std::vector<double>& next_v) {
    double v = p.wait_cost;
    for (const auto& o : p.rows[s]) v += o.probability * (o.next ? next_v[*o.next] : o.payoff);
    return v;
}

}  // namespace

ReferenceTable solve_stopping(const StoppingProblem& p) {
    check_rows(p);
    const std::size_t n = p.n_states;
    ReferenceTable ref;
    ref.values.assign(static_cast<std::size_t>(p.horizon) * n * 2, 0.0);
    ref.control.assign(static_cast<std::size_t>(p.horizon) * n, 0);
    std::vector<double> next_v(n, p.stop_cost), v(n);
    for (int t = p.horizon - 1; t >= 0; --t) {
        for (std::size_t s = 0; s < n; ++s) {
            const std::size_t cell = static_cast<std::size_t>(t) * n + s;
            const double wait = wait_value(p, s, next_v);
            ref.values[2 * cell] = p.stop_cost;
            ref.values[2 * cell + 1] = wait;
            ref.control[cell] = wait < p.stop_cost ? 1 : 0;
            v[s] = std::min(wait, p.stop_cost);
        }
        next_v.swap(v);
    }
    return ref;
}

std::vector<double> enumerate_stopping_values(const StoppingProblem& p) {
    check_rows(p);
    const std::size_t n = p.n_states;
    const std::size_t bits = static_cast<std::size_t>(p.horizon) * n;
    if (bits > 20) throw std::invalid_argument("enumeration limited to 20 decision cells");
    std::vector<double> best(bits, std::numeric_limits<double>::infinity());
    std::vector<double> next_v(n), v(n);
    for (std::uint64_t policy = 0; policy < (std::uint64_t{1} << bits); ++policy) {
        std::fill(next_v.begin(), next_v.end(), p.stop_cost);
        for (int t = p.horizon - 1; t >= 0; --t) {
            for (std::size_t s = 0; s < n; ++s) {
                const std::size_t cell = static_cast<std::size_t>(t) * n + s;
                v[s] = (policy >> cell) & 1u ? wait_value(p, s, next_v) : p.stop_cost;
                best[cell] = std::min(best[cell], v[s]);
            }
            next_v.swap(v);
        }
    }
    return best;
}

namespace {

StoppingProblem placement_problem(const LobModel& model) {
    model.validate();
    const PlacementIndex index(model);
    const std::size_t per_t = index.n_cells() / static_cast<std::size_t>(index.horizon());
    StoppingProblem p;
    p.n_states = per_t;
    p.horizon = model.costs.horizon_T;
    p.stop_cost = model.costs.spread_psi;
    p.wait_cost = model.costs.wait_cost_c;
    p.rows.resize(per_t);
    for (std::size_t s = 0; s < per_t; ++s) {
        const LobState state = index.decode_cell(s).second;
        for (const auto& b : lob_kernel(model, state)) {
            StoppingOutcome o;
            o.probability = b.probability;
            if (b.payoff)
                o.payoff = *b.payoff;
            else
                o.next = index.cell(0, b.next);
            p.rows[s].push_back(o);
        }
    }
    return p;
}

}  // namespace

ReferenceTable solve_placement_reference(const LobModel& model) {
    return solve_stopping(placement_problem(model));
}

double placement_bellman_residual(const LobModel& model, const ReferenceTable& ref) {
    const StoppingProblem p = placement_problem(model);
    const std::size_t n = p.n_states;
    if (ref.values.size() != static_cast<std::size_t>(p.horizon) * n * 2)
        throw std::invalid_argument("placement reference has the wrong size");
    double worst = 0.0;
    std::vector<double> next_v(n);
    for (int t = 0; t < p.horizon; ++t) {
        for (std::size_t s = 0; s < n; ++s) {
            if (t + 1 == p.horizon) {
                next_v[s] = p.stop_cost;
            } else {
                const std::size_t c = static_cast<std::size_t>(t + 1) * n + s;
                next_v[s] = std::min(ref.values[2 * c], ref.values[2 * c + 1]);
            }
        }
        for (std::size_t s = 0; s < n; ++s) {
            const std::size_t c = static_cast<std::size_t>(t) * n + s;
            worst = std::max(worst, std::abs(ref.values[2 * c] - p.stop_cost));
            worst = std::max(worst, std::abs(ref.values[2 * c + 1] - wait_value(p, s, next_v)));
        }
    }
    return worst;
}

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

}  // namespace

double expected_max_of_lines(std::span<const double> slopes, std::span<const double> intercepts,
                             double mean, double sd) {
    if (slopes.empty() || slopes.size() != intercepts.size())
        throw std::invalid_argument("expected_max_of_lines: bad input");
    if (sd <= 0.0) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < slopes.size(); ++i)
            best = std::max(best, slopes[i] * mean + intercepts[i]);
        return best;
    }
    std::vector<std::size_t> order(slopes.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return slopes[a] != slopes[b] ? slopes[a] < slopes[b] : intercepts[a] < intercepts[b];
    });

    // Upper envelope, slopes increasing from left to right.
    std::vector<std::pair<double, double>> hull;
    for (std::size_t k : order) {
        const double b = slopes[k], c = intercepts[k];
        if (!hull.empty() && hull.back().first == b) hull.pop_back();
        while (hull.size() >= 2) {
            const auto [b1, c1] = hull[hull.size() - 2];
            const auto [b2, c2] = hull.back();
            // Drop the middle line when the new one overtakes the first no later.
            if ((c1 - c) * (b2 - b1) <= (c1 - c2) * (b - b1))
                hull.pop_back();
            else
                break;
        }
        hull.emplace_back(b, c);
    }

    double total = 0.0;
    double lo = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < hull.size(); ++k) {
        const double hi = k + 1 < hull.size()
                              ? (hull[k].second - hull[k + 1].second) / (hull[k + 1].first - hull[k].first)
                              : std::numeric_limits<double>::infinity();
        const double zl = (lo - mean) / sd, zh = (hi - mean) / sd;
        const double prob = normal_cdf(zh) - normal_cdf(zl);
        const double pdf_l = std::isfinite(zl) ? normal_pdf(zl) : 0.0;
        const double pdf_h = std::isfinite(zh) ? normal_pdf(zh) : 0.0;
        const double partial_mean = mean * prob + sd * (pdf_l - pdf_h);
        total += hull[k].second * prob + hull[k].first * partial_mean;
        lo = hi;
    }
    return total;
}

ReferenceTable solve_execution_reference(const ExecModel& m) {
    m.validate();
    ReferenceTable ref;
    ref.values.assign(m.n_states(), 0.0);
    ref.control.assign(static_cast<std::size_t>(m.k_T) * (m.k_q + 1), 0);
    for (int j = 0; j <= m.k_q; ++j) {
        const double q = m.inventory(j);
        ref.values[m.index(m.k_T, j)] = -m.A_terminal * q * q;
    }
    for (int t = m.k_T - 1; t >= 0; --t) {
        for (int i = 0; i <= m.k_q; ++i) {
            const double q = m.inventory(i);
            double best = -std::numeric_limits<double>::infinity();
            int arg = i;
            for (int j = 0; j <= m.k_q; ++j) {
                const double x = exec_expected_gain(m, q, m.speed(i, j)) + ref.values[m.index(t + 1, j)];
                if (x > best) {
                    best = x;
                    arg = j;
                }
            }
            ref.values[m.index(t, i)] = best - m.phi * m.delta() * q * q;
            ref.control[m.index(t, i)] = arg;
        }
    }
    return ref;
}

namespace {

// E[max_j {M(nu_j) + v(t + 1, q_j)}] at (t, i) given the next row.
double esup_target(const ExecModel& m, int i, std::span<const double> next_row, int* arg) {
    const double d = m.delta();
    const double q = m.inventory(i);
    std::vector<double> slopes(next_row.size()), intercepts(next_row.size());
    double best_mean = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < next_row.size(); ++j) {
        const double nu = m.speed(i, static_cast<int>(j));
        slopes[j] = nu;
        intercepts[j] = -m.kappa * nu * nu * d + next_row[j];
        const double mean_j = nu * m.alpha * d * d / 2.0 + intercepts[j];
        if (arg && mean_j > best_mean) {
            best_mean = mean_j;
            *arg = static_cast<int>(j);
        }
    }
    // Y = Delta dS - dS_bar ~ N(alpha Delta^2 / 2, sigma^2 Delta^3 / 3).
    const double y_mean = m.alpha * d * d / 2.0;
    const double y_sd = m.sigma * d * std::sqrt(d / 3.0);
    return q * m.alpha * d + expected_max_of_lines(slopes, intercepts, y_mean, y_sd);
}

}  // namespace

ReferenceTable solve_execution_reference_esup(const ExecModel& m) {
    m.validate();
    ReferenceTable ref;
    ref.values.assign(m.n_states(), 0.0);
    ref.control.assign(static_cast<std::size_t>(m.k_T) * (m.k_q + 1), 0);
    const std::size_t row = static_cast<std::size_t>(m.k_q) + 1;
    for (int j = 0; j <= m.k_q; ++j) {
        const double q = m.inventory(j);
        ref.values[m.index(m.k_T, j)] = -m.A_terminal * q * q;
    }
    for (int t = m.k_T - 1; t >= 0; --t) {
        const std::span<const double> next(ref.values.data() + m.index(t + 1, 0), row);
        for (int i = 0; i <= m.k_q; ++i) {
            const double q = m.inventory(i);
            int arg = i;
            ref.values[m.index(t, i)] = esup_target(m, i, next, &arg) - m.phi * m.delta() * q * q;
            ref.control[m.index(t, i)] = arg;
        }
    }
    return ref;
}

double execution_bellman_residual(const ExecModel& m, const ReferenceTable& ref, bool esup) {
    if (ref.values.size() != m.n_states()) throw std::invalid_argument("execution reference size");
    const std::size_t row = static_cast<std::size_t>(m.k_q) + 1;
    double worst = 0.0;
    for (int j = 0; j <= m.k_q; ++j) {
        const double q = m.inventory(j);
        worst = std::max(worst, std::abs(ref.values[m.index(m.k_T, j)] + m.A_terminal * q * q));
    }
    for (int t = 0; t < m.k_T; ++t) {
        const std::span<const double> next(ref.values.data() + m.index(t + 1, 0), row);
        for (int i = 0; i <= m.k_q; ++i) {
            const double q = m.inventory(i);
            double target;
            if (esup) {
                target = esup_target(m, i, next, nullptr);
            } else {
                target = -std::numeric_limits<double>::infinity();
                for (int j = 0; j <= m.k_q; ++j)
                    target = std::max(target, exec_expected_gain(m, q, m.speed(i, j)) + next[j]);
            }
            target -= m.phi * m.delta() * q * q;
            worst = std::max(worst, std::abs(ref.values[m.index(t, i)] - target));
        }
    }
    return worst;
}

double sup_expected_gain(double alpha, double delta, double kappa, double q) {
    return alpha * alpha * delta * delta * delta / (16.0 * kappa) + alpha * q * delta;
}

SupGapEstimate empirical_sup_gap(double alpha, double sigma, double delta, double kappa, double q,
                                 std::int64_t draws, Rng& rng) {
    if (draws < 2) throw std::invalid_argument("empirical_sup_gap: need at least 2 draws");
    ExecModel m;
    m.alpha = alpha;
    m.sigma = sigma;
    m.kappa = kappa;
    m.T = delta;
    m.k_T = 1;
    double sum = 0.0, sum_sq = 0.0;
    for (std::int64_t k = 0; k < draws; ++k) {
        const PriceIncrement inc = sample_increment(m, rng);
        const double y = delta * inc.dS - inc.dS_bar;
        // sup over nu of nu Y - kappa nu^2 Delta is reached at nu = Y / (2 kappa Delta).
        const double x = y * y / (4.0 * kappa * delta) + q * inc.dS;
        sum += x;
        sum_sq += x * x;
    }
    const double n = static_cast<double>(draws);
    const double mean = sum / n;
    const double var = (sum_sq - n * mean * mean) / (n - 1.0);
    SupGapEstimate est;
    est.gap = mean - sup_expected_gain(alpha, delta, kappa, q);
    est.standard_error = std::sqrt(var / n);
    est.predicted = sigma * sigma * delta * delta / (12.0 * kappa);
    return est;
}

namespace {

double weight(std::span<const double> w, std::size_t z, std::size_t n) {
    return w.empty() ? 1.0 / static_cast<double>(n) : w[z];
}

void check_spaces(std::size_t a, std::size_t b, std::span<const double> w) {
    if (a != b || (!w.empty() && w.size() != a))
        throw std::invalid_argument("l2_gap: mismatched state spaces");
}

}  // namespace

double l2_gap(std::span<const double> values, std::span<const double> reference,
              std::span<const double> weights) {
    check_spaces(values.size(), reference.size(), weights);
    double s = 0.0;
    for (std::size_t z = 0; z < values.size(); ++z) {
        const double d = values[z] - reference[z];
        s += weight(weights, z, values.size()) * d * d;
    }
    return s;
}

double l2_gap_saga(std::span<const double> values, std::span<const double> reference,
                   const SagaMemory& memory, std::span<const double> m_star, double c,
                   std::span<const double> weights) {
    check_spaces(values.size(), reference.size(), weights);
    const auto depth = static_cast<std::size_t>(memory.depth());
    check_spaces(values.size() * depth, m_star.size(), {});
    double s = 0.0;
    for (std::size_t z = 0; z < values.size(); ++z) {
        const auto slots = memory.slots(z);
        double spread = 0.0;
        for (std::size_t j = 0; j < depth; ++j) {
            const double diff = slots[j] - m_star[z * depth + j];
            spread += diff * diff;
        }
        spread /= static_cast<double>(depth);
        const double d = values[z] - reference[z];
        s += weight(weights, z, values.size()) * (spread + c * d * d);
    }
    return s;
}

std::vector<double> saga_same_sample_m_star(const SagaMemory& memory,
                                            std::span<const double> reference) {
    const auto depth = memory.depth();
    std::vector<double> out;
    out.reserve(reference.size() * static_cast<std::size_t>(depth));
    for (std::size_t z = 0; z < reference.size(); ++z)
        for (int j = 0; j < depth; ++j)
            out.push_back(memory.slot(z, j) - memory.anchor(z, j) + reference[z]);
    return out;
}

}  // namespace sastep
