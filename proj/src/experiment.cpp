#include "sastep/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace sastep {

void ResultFrame::sort() {
    std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
        return std::tie(a.algo, a.policy, a.seed, a.step, a.metric) <
               std::tie(b.algo, b.policy, b.seed, b.step, b.metric);
    });
}

ExperimentReferences build_references(const ExperimentConfig& c) {
    ExperimentReferences refs;
    switch (c.environment) {
        case EnvironmentKind::drift:
            refs.primary = solve_drift_reference(c.drift);
            break;
        case EnvironmentKind::placement:
            refs.primary = solve_placement_reference(c.placement);
            break;
        case EnvironmentKind::execution:
            refs.primary = solve_execution_reference_esup(c.execution);
            refs.secondary = solve_execution_reference(c.execution);
            break;
    }
    return refs;
}

std::vector<int> placement_initial_control(const LobModel& model, const std::vector<int>& control) {
    const PlacementIndex index(model);
    const std::size_t per_t = index.n_cells() / static_cast<std::size_t>(index.horizon());
    if (control.size() < per_t) throw std::invalid_argument("control map too small");
    return {control.begin(), control.begin() + static_cast<std::ptrdiff_t>(per_t)};
}

namespace {

double agreement(const std::vector<int>& a, const std::vector<int>& b) {
    std::size_t same = 0;
    for (std::size_t i = 0; i < a.size(); ++i) same += a[i] == b[i];
    return static_cast<double>(same) / static_cast<double>(a.size());
}

// Error of the learner in the sense of its own analysis: SAGA carries its memory.
double learner_gap(const Engine& engine, const std::vector<double>& reference, double saga_c,
                   const std::vector<double>& weights) {
    const auto& values = engine.table().values();
    if (engine.saga_memory()) {
        const auto m_star = saga_same_sample_m_star(*engine.saga_memory(), reference);
        return l2_gap_saga(values, reference, *engine.saga_memory(), m_star, saga_c, weights);
    }
    return l2_gap(values, reference, weights);
}

void check_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw std::domain_error(std::string("non-finite ") + what);
}

}  // namespace

PathResult run_path(const ExperimentConfig& c, const ExperimentReferences& refs, const RunSpec& run,
                    int path_index) {
    PathResult out;
    out.run = run;
    out.path_index = path_index;
    out.seed = static_cast<std::int64_t>(c.seed) + path_index;
    Rng rng = make_stream(c.seed, static_cast<std::uint64_t>(path_index));

    EngineConfig ec = c.engine;
    ec.algorithm = run.algorithm;
    ec.stepsize.kind = run.policy;
    const std::string algo = to_string(run.algorithm);
    const std::string policy = to_string(run.policy);
    const bool saga = run.algorithm == Algorithm::saga;
    const std::int64_t cadence = effective_cadence(c);

    auto emit = [&](std::int64_t step, const std::string& metric, double value) {
        check_finite(value, metric.c_str());
        out.rows.push_back({step, metric, value, algo, policy, out.seed});
    };

    std::int64_t step = 0;
    try {
        switch (c.environment) {
            case EnvironmentKind::drift: {
                Engine engine(c.drift.n_states(), ec);
                const std::vector<double> uniform;
                for (std::int64_t ep = 1; ep <= c.episodes; ++ep) {
                    step = ep;
                    drift_episode(c.drift, engine, rng);
                    if (ep % cadence) continue;
                    emit(ep, "l2_gap", learner_gap(engine, refs.primary.values, c.saga_c, uniform));
                    if (saga) emit(ep, "l2_gap_iterate", l2_gap(engine.table().values(), refs.primary.values));
                }
                out.final_values = engine.table().values();
                break;
            }
            case EnvironmentKind::placement: {
                const PlacementIndex index(c.placement);
                Engine engine(index.n_states(), ec);
                const auto ref_control = placement_initial_control(c.placement, refs.primary.control);
                const std::vector<double> uniform;
                for (std::int64_t ep = 1; ep <= c.episodes; ++ep) {
                    step = ep;
                    placement_episode(c.placement, index, engine, rng);
                    if (ep % cadence) continue;
                    emit(ep, "l2_gap", learner_gap(engine, refs.primary.values, c.saga_c, uniform));
                    if (saga) emit(ep, "l2_gap_iterate", l2_gap(engine.table().values(), refs.primary.values));
                    const auto learned = placement_initial_control(c.placement, learned_control(index, engine.table()));
                    emit(ep, "control_agreement", agreement(learned, ref_control));
                }
                out.final_values = engine.table().values();
                out.final_control = placement_initial_control(c.placement, learned_control(index, engine.table()));
                break;
            }
            case EnvironmentKind::execution: {
                const ExecModel& m = c.execution;
                Engine engine(m.n_states(), ec);
                // Terminal values are exact; only the learnable rows are weighted.
                std::vector<double> w(m.n_states(), 0.0);
                const double share = 1.0 / (static_cast<double>(m.k_T) * (m.k_q + 1));
                for (int t = 0; t < m.k_T; ++t)
                    for (int j = 0; j <= m.k_q; ++j) w[m.index(t, j)] = share;
                ExecRunOptions opts = c.exec_run;
                opts.cadence = cadence;
                exec_run(m, engine, opts, rng, [&](std::int64_t s, const IterateTable&) {
                    step = s;
                    emit(s, "l2_gap", learner_gap(engine, refs.primary.values, c.saga_c, w));
                    emit(s, "l2_gap_sup_e", l2_gap(engine.table().values(), refs.secondary.values, w));
                });
                out.final_values = engine.table().values();
                break;
            }
        }
    } catch (const std::domain_error& e) {
        out.aborted = true;
        out.diagnostic = e.what();
        out.rows.push_back({step, "aborted", static_cast<double>(step), algo, policy, out.seed});
    }
    return out;
}

ResultFrame aggregate(const ExperimentConfig& c, std::vector<PathResult> paths) {
    (void)c;
    std::sort(paths.begin(), paths.end(), [](const PathResult& a, const PathResult& b) {
        return std::tie(a.run.algorithm, a.run.policy, a.path_index) <
               std::tie(b.run.algorithm, b.run.policy, b.path_index);
    });
    ResultFrame frame;
    using Key = std::tuple<std::string, std::string, std::int64_t, std::string>;
    std::map<Key, std::vector<double>> groups;
    std::map<std::pair<std::string, std::string>, std::int64_t> base_seed;
    for (const auto& p : paths) {
        for (const auto& r : p.rows) {
            frame.rows.push_back(r);
            if (!p.aborted) groups[{r.algo, r.policy, r.step, r.metric}].push_back(r.value);
        }
        auto key = std::make_pair(to_string(p.run.algorithm), to_string(p.run.policy));
        if (!base_seed.count(key)) base_seed[key] = p.seed;
    }
    for (const auto& [key, values] : groups) {
        const auto& [algo, policy, step, metric] = key;
        const double n = static_cast<double>(values.size());
        double mean = 0.0;
        for (double v : values) mean += v;
        mean /= n;
        double ss = 0.0;
        for (double v : values) ss += (v - mean) * (v - mean);
        const double se = values.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
        const std::int64_t seed = base_seed[{algo, policy}];
        frame.rows.push_back({step, metric + "_mean", mean, algo, policy, seed});
        frame.rows.push_back({step, metric + "_se", se, algo, policy, seed});
    }
    frame.sort();
    return frame;
}

ExperimentResult run_experiment(const ExperimentConfig& c) {
    validate_config(c);
    ExperimentResult result;
    result.references = build_references(c);

    struct Job {
        RunSpec run;
        int path;
    };
    std::vector<Job> jobs;
    for (const auto& r : c.runs)
        for (int p = 0; p < c.paths; ++p) jobs.push_back({r, p});
    result.paths.resize(jobs.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < jobs.size(); k = next++)
            result.paths[k] = run_path(c, result.references, jobs[k].run, jobs[k].path);
    };
    const int n_threads = std::min<int>(c.workers, static_cast<int>(jobs.size()));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    result.frame = aggregate(c, result.paths);
    return result;
}

double frame_value(const ResultFrame& frame, const RunSpec& run, const std::string& metric,
                   std::int64_t step) {
    const std::string algo = to_string(run.algorithm), policy = to_string(run.policy);
    for (const auto& r : frame.rows)
        if (r.step == step && r.metric == metric && r.algo == algo && r.policy == policy) return r.value;
    throw std::out_of_range("no row for " + algo + "/" + policy + " " + metric + " at step " +
                            std::to_string(step));
}

}  // namespace sastep
