// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "sastep/analysis.hpp"
#include "sastep/bounds.hpp"
#include "sastep/config.hpp"
#include "sastep/experiment.hpp"
#include "sastep/output.hpp"
#include "sastep/random.hpp"
#include "sastep/reference.hpp"

using namespace sastep;

namespace {

// Pinned tolerances and budgets.
constexpr double kSigmaMultiplier = 3.0;         // AC1
constexpr double kLemmaTolerance = 1e-12;        // AC2
constexpr double kOrderingMargin = 0.0;          // AC4: A <= B - margin
constexpr double kPlacementAgreement = 0.90;     // AC5
constexpr double kExecutionDecrease = 10.0;      // AC6
constexpr double kSupGapRelative = 0.01;         // AC7
constexpr double kSqrtSlopeLo = -0.6, kSqrtSlopeHi = -0.4, kInverseSlopeTol = 0.02;  // AC8

std::string config_path(const char* name) { return std::string(SASTEP_CONFIG_DIR) + "/" + name; }

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double budget_seconds;  // 0 = no budget stated
    std::function<Outcome()> run;
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

Outcome ac1() {
    const std::vector<double> gammas{0.05, 0.1, 0.2, 0.3, 0.5};
    SyntheticQuadratic problem;  // q* = 0, sigma = 1, q = 1
    int violations = 0, checks = 0;
    double worst = -INFINITY;
    for (auto algo : {Algorithm::rl, Algorithm::saga, Algorithm::pass}) {
        for (double g : gammas) {
            ContractionSetup s;
            s.algorithm = algo;
            s.gamma = g;
            s.slot_q = {0.8, 1.3, -0.4, 0.5, 1.1};
            s.slot_x = {0.2, -0.9, 0.4, 1.5, -0.3};
            s.gamma_hat_prev = g;
            s.last_residual = 1.0;
            Rng rng = make_stream(1000 + checks, 0);
            const auto r = prop5_contraction_check(problem, s, 10000, rng);
            ++checks;
            const double z = (r.mc_mean - r.bound) / r.mc_standard_error;
            worst = std::max(worst, z);
            if (r.mc_mean > r.bound + kSigmaMultiplier * r.mc_standard_error) ++violations;
        }
    }
    return {violations == 0, std::to_string(checks) + " (algorithm, gamma) cases, " + std::to_string(violations) +
                                 " beyond 3 SE, largest (mean - bound)/SE = " + fmt("%.2f", worst)};
}

Outcome ac2() {
    Rng rng = make_stream(2, 0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(uniform_index(rng, 100));
        std::vector<double> mu(n), a(n), b(n), eps(n);
        double mass = 0.0;
        for (int k = 0; k < n; ++k) {
            mu[k] = uniform01(rng);
            b[k] = uniform01(rng);
            eps[k] = uniform01(rng);
            mass += (a[k] = uniform01(rng));
        }
        for (double& x : a) x /= mass;
        worst = std::max(worst, lemma5_recursion(mu, a, b, eps, n).gap);
    }
    return {worst <= kLemmaTolerance, "100 instances, max gap " + fmt("%.3e", worst)};
}

Outcome ac3() {
    Rng rng = make_stream(3, 0);
    const int horizon = 100;
    long long comparisons = 0, violations = 0;
    for (int draw = 0; draw < 50; ++draw) {
        ErrorModel m;
        m.L = 0.2 + 1.8 * uniform01(rng);
        m.B = m.L * (1.0 + 2.0 * uniform01(rng));  // L <= B, both sides of L^2
        m.v = 2.0 * uniform01(rng);
        const double x2 = m.x2();
        const double e0 = uniform01(rng) * std::min(x2, 5.0);
        std::vector<double> S(horizon);
        std::vector<char> active(horizon);
        const double scale = 0.3 * uniform01(rng);
        for (int k = 0; k < horizon; ++k) {
            S[k] = -scale * uniform01(rng);
            active[k] = uniform01(rng) < 0.8;
        }
        std::vector<double> opt(horizon + 1);
        opt[0] = e0;
        for (int k = 0; k < horizon; ++k)
            opt[k + 1] = active[k] ? m.one_step(opt[k], m.greedy_gamma(opt[k]), S[k]) : opt[k];

        for (int p = 0; p < 100; ++p) {
            const double c = 2.0 * m.L / m.B * uniform01(rng);
            const double eta = uniform01(rng);
            double e = e0;
            for (int k = 0; k < horizon; ++k) {
                double g = 0.0;
                switch (p % 4) {
                    case 0: g = 2.0 * m.L / m.B * uniform01(rng); break;            // i.i.d. draws
                    case 1: g = c; break;                                           // constant
                    case 2: g = eta / (k + 1.0); break;                             // decreasing
                    case 3: g = m.greedy_gamma(e) * (0.5 + uniform01(rng)); break;  // noisy greedy
                }
                if (active[k]) e = m.one_step(e, g, S[k]);
                ++comparisons;
                if (opt[k + 1] > e) ++violations;
            }
        }
    }
    return {violations == 0, std::to_string(comparisons) + " step comparisons, " + std::to_string(violations) +
                                 " where the optimal policy was worse"};
}

Outcome ac4() {
    ExperimentConfig c = load_config(config_path("drift.ini"));
    const auto r = run_experiment(c);
    const RunSpec pass{Algorithm::pass, ScheduleKind::piecewise_constant};
    const RunSpec saga{Algorithm::saga, ScheduleKind::piecewise_constant};
    const RunSpec constant{Algorithm::rl, ScheduleKind::constant};
    const RunSpec inv{Algorithm::rl, ScheduleKind::inverse_power};
    auto at = [&](const RunSpec& s, const char* metric, std::int64_t step) { return frame_value(r.frame, s, metric, step); };
    const std::int64_t last = c.episodes;
    const double p = at(pass, "l2_gap_mean", last), sg = at(saga, "l2_gap_mean", last);
    const double cs = at(constant, "l2_gap_mean", last);
    const double c50 = at(constant, "l2_gap_mean", 50), i50 = at(inv, "l2_gap_mean", 50);
    const bool a = p <= sg - kOrderingMargin, b = p <= cs - kOrderingMargin, d = c50 <= i50 - kOrderingMargin;
    std::string detail = "final PASS " + fmt("%.4g", p) + (a ? " <= " : " > ") + "SAGA+PC " + fmt("%.4g", sg) +
                         " (iterate-only " + fmt("%.4g", at(saga, "l2_gap_iterate_mean", last)) + "); PASS" +
                         (b ? " <= " : " > ") + "constant " + fmt("%.4g", cs) + "; episode 50: constant " +
                         fmt("%.4g", c50) + (d ? " <= " : " > ") + "eta/n " + fmt("%.4g", i50);
    return {a && b && d, detail};
}

Outcome ac5() {
    ExperimentConfig c = load_config(config_path("placement.ini"));
    const RunSpec run = c.runs.front();
    const double agree = frame_value(run_experiment(c).frame, run, "control_agreement_mean", c.episodes);

    ExperimentConfig free = c;
    free.placement.costs.spread_psi = 0.0;
    const auto fr = run_experiment(free);
    const double agree0 = frame_value(fr.frame, run, "control_agreement_mean", free.episodes);
    bool all_cross = true;
    for (int x : placement_initial_control(free.placement, fr.references.primary.control)) all_cross = all_cross && x == 0;
    return {agree >= kPlacementAgreement && agree0 == 1.0 && all_cross,
            "mean agreement " + fmt("%.4f", agree) + " over " + std::to_string(c.paths) + " paths; psi=0 map " +
                fmt("%.4f", agree0) + (all_cross ? " (reference all cross)" : " (reference not all cross)")};
}

Outcome ac6() {
    ExperimentConfig c = load_config(config_path("execution.ini"));
    const auto r = run_experiment(c);
    const RunSpec run = c.runs.front();
    const double early = frame_value(r.frame, run, "l2_gap_mean", 1000);
    const double late = frame_value(r.frame, run, "l2_gap_mean", 100000);
    const ExecModel& m = c.execution;
    bool terminal_exact = true, budget = true;
    for (const auto& p : r.paths) {
        for (int j = 0; j <= m.k_q; ++j) {
            const double q = m.inventory(j);
            terminal_exact = terminal_exact && p.final_values[m.index(m.k_T, j)] == -m.A_terminal * q * q;
        }
        budget = budget && !p.rows.empty() && p.rows.back().step == c.exec_run.iterations;
    }
    return {early / late >= kExecutionDecrease && terminal_exact && budget,
            "L2 gap " + fmt("%.4g", early) + " at 1e3, " + fmt("%.4g", late) + " at 1e5 (x" +
                fmt("%.1f", early / late) + "); terminal row " + (terminal_exact ? "exact" : "NOT exact") +
                "; budget " + (budget ? "exact" : "NOT exact")};
}

Outcome ac7() {
    Rng rng = make_stream(7, 0);
    const auto g = empirical_sup_gap(0.1, 1.0, 0.1, 0.1, 0.0, 1000000, rng);
    const double rel = std::abs(g.gap - g.predicted) / g.predicted;
    return {rel <= kSupGapRelative, "gap " + fmt("%.5e", g.gap) + " vs " + fmt("%.5e", g.predicted) +
                                        " (rel. error " + fmt("%.3f%%", 100 * rel) + ", SE " +
                                        fmt("%.1e", g.standard_error) + ")"};
}

Outcome ac8() {
    ExperimentConfig c = load_config(config_path("drift.ini"));
    c.runs = {{Algorithm::rl, ScheduleKind::inverse_power}};
    c.engine.stepsize.eta = 1.0;
    c.episodes = 10000;
    c.cadence = 10;
    const auto r = run_experiment(c);
    ErrorCurve rmse, inverse;
    for (const auto& row : r.frame.rows)
        if (row.metric == "l2_gap_mean") {
            rmse.add(row.step, std::sqrt(row.value));
            inverse.add(row.step, 1.0 / static_cast<double>(row.step));
        }
    const double s = fit_rate(rmse).slope, s1 = fit_rate(inverse).slope;
    return {s >= kSqrtSlopeLo && s <= kSqrtSlopeHi && std::abs(s1 + 1.0) <= kInverseSlopeTol,
            "sample-mean RMSE slope " + fmt("%.4f", s) + ", synthetic 1/n slope " + fmt("%.4f", s1)};
}

Outcome ac9() {
    ExperimentConfig c = load_config(config_path("bounds.ini"));
    Rng rng = make_stream(c.seed, 0);
    const auto t = check_theorem1_two_state(c.chain, c.bound_horizon, c.bound_replications, c.bound_calibration, rng);
    std::string detail = "B' " + fmt("%.4g", t.B_prime) + " fitted at n=" + std::to_string(t.calibration_horizon) + "; ";
    if (t.first_violation < 0) {
        detail += "bound dominates for 3 <= n <= " + std::to_string(c.bound_horizon);
    } else {
        int count = 0;
        for (int n = 3; n <= c.bound_horizon; ++n) count += t.bound[n - 1] < t.simulated[n - 1] ? 1 : 0;
        detail += "bound below simulation at " + std::to_string(count) + " horizons from n=" +
                  std::to_string(t.first_violation) + " (smallest dominating B' " + fmt("%.4g", t.B_prime_required) + ")";
    }
    return {t.first_violation < 0, detail};
}

Outcome ac10() {
    std::vector<std::string> notes;
    bool same = true;
    for (const char* name : {"drift.ini", "placement.ini"}) {
        ExperimentConfig c = load_config(config_path(name));
        if (c.environment == EnvironmentKind::drift) {
            c.paths = 20;
            c.episodes = 200;
        }
        c.workers = 1;
        const auto one = results_csv(run_experiment(c).frame);
        const auto again = results_csv(run_experiment(c).frame);
        c.workers = 8;
        const auto eight = results_csv(run_experiment(c).frame);
        const bool ok = one == again && one == eight;
        same = same && ok;
        notes.push_back(std::string(name) + (ok ? " identical" : " DIFFERS") + " (" + std::to_string(one.size()) + " bytes)");
    }
    return {same, notes[0] + ", " + notes[1]};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "per-step contraction", 60, ac1},
        {2, "recursion identity", 30, ac2},
        {3, "optimal-rate dominance", 30, ac3},
        {4, "drift ordering", 120, ac4},
        {5, "placement control map", 120, ac5},
        {6, "execution convergence", 300, ac6},
        {7, "sup-gap constant", 60, ac7},
        {8, "rate fitting", 30, ac8},
        {9, "error bound on two-state chain", 60, ac9},
        {10, "determinism across workers", 0, ac10},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_budget = c.budget_seconds <= 0 || secs <= c.budget_seconds;
        const bool pass = o.pass && in_budget;
        failed += pass ? 0 : 1;
        std::printf("AC%-2d %s  %s: %s [%.1fs%s]\n", c.id, pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs,
                    in_budget ? "" : ", over budget");
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
