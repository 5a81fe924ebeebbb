// Command-line driver: run experiments, solve references, evaluate the error bound.
#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>

#include "sastep/config.hpp"
#include "sastep/experiment.hpp"
#include "sastep/output.hpp"
#include "sastep/random.hpp"

using namespace sastep;
using nlohmann::json;

namespace {

struct CommonOptions {
    std::string config_path;
    std::string out_dir;
};

ExperimentConfig load_or_default(const CommonOptions& opt) {
    ExperimentConfig config = opt.config_path.empty() ? ExperimentConfig{} : load_config(opt.config_path);
    if (!opt.out_dir.empty()) config.output_dir = opt.out_dir;
    return config;
}

std::string join(const std::string& dir, const std::string& file) {
    return (std::filesystem::path(dir) / file).string();
}

void emit_maps(const ExperimentConfig& config, const ExperimentResult& result) {
    const std::string& dir = config.output_dir;
    if (config.environment == EnvironmentKind::placement) {
        const auto ref_ctrl = placement_initial_control(config.placement, result.references.primary.control);
        std::vector<CellMap> panels;
        for (int qo = 1; qo <= config.placement.grid.q_opp_max; ++qo)
            panels.push_back(placement_control_map(config.placement, ref_ctrl, qo,
                                                   "reference, Q_opp=" + std::to_string(qo)));
        for (const auto& p : result.paths) {
            if (p.path_index != 0 || p.aborted || p.final_control.empty()) continue;
            for (int qo = 1; qo <= config.placement.grid.q_opp_max; ++qo)
                panels.push_back(placement_control_map(
                    config.placement, p.final_control, qo,
                    to_string(p.run.algorithm) + "+" + to_string(p.run.policy) + ", Q_opp=" + std::to_string(qo)));
        }
        write_text(join(dir, "control_map.svg"), maps_svg(panels));
    } else if (config.environment == EnvironmentKind::execution) {
        std::vector<CellMap> panels{
            execution_value_map(config.execution, result.references.primary.values, "reference")};
        for (const auto& p : result.paths)
            if (p.path_index == 0 && !p.aborted)
                panels.push_back(execution_value_map(config.execution, p.final_values,
                                                     to_string(p.run.algorithm) + "+" + to_string(p.run.policy)));
        write_text(join(dir, "value_map.svg"), maps_svg(panels));
    }
}

int cmd_run(const std::string& env, const CommonOptions& common, const std::optional<std::string>& algo,
            const std::optional<std::string>& policy, std::optional<std::int64_t> episodes,
            std::optional<int> paths, std::optional<std::uint64_t> seed, std::optional<int> workers) {
    ExperimentConfig config = load_or_default(common);
    config.environment = parse_environment(env);
    if (algo || policy) {
        RunSpec run = config.runs.empty() ? RunSpec{} : config.runs.front();
        if (algo) run.algorithm = parse_algorithm(*algo);
        if (policy) run.policy = parse_policy(*policy);
        config.runs = {run};
    }
    if (episodes) {
        if (config.environment == EnvironmentKind::execution) config.exec_run.iterations = *episodes;
        else config.episodes = *episodes;
    }
    if (paths) config.paths = *paths;
    if (seed) config.seed = *seed;
    if (workers) config.workers = *workers;
    validate_config(config);
    ensure_output_dir(config.output_dir);

    const ExperimentResult result = run_experiment(config);
    write_text(join(config.output_dir, "results.csv"), results_csv(result.frame));
    write_text(join(config.output_dir, "curves.svg"),
               curves_svg(result.frame, "l2_gap", to_string(config.environment) + ": L2 error"));
    emit_maps(config, result);
    write_text(join(config.output_dir, "config.ini"), serialize_config(config));

    int aborted = 0;
    for (const auto& p : result.paths) aborted += p.aborted ? 1 : 0;
    std::cout << json{{"status", "ok"}, {"rows", result.frame.rows.size()}, {"aborted_paths", aborted},
                      {"out", config.output_dir}}
                     .dump()
              << "\n";
    return 0;
}

int cmd_reference(const std::string& env, const CommonOptions& common) {
    ExperimentConfig config = load_or_default(common);
    config.environment = parse_environment(env);
    validate_config(config);
    ensure_output_dir(config.output_dir);
    json summary{{"status", "ok"}, {"environment", env}};
    switch (config.environment) {
        case EnvironmentKind::drift: {
            const auto ref = solve_drift_reference(config.drift);
            write_text(join(config.output_dir, "reference.csv"), drift_reference_csv(ref));
            break;
        }
        case EnvironmentKind::placement: {
            const auto ref = solve_placement_reference(config.placement);
            write_text(join(config.output_dir, "reference.csv"), placement_reference_csv(config.placement, ref));
            const auto ctrl = placement_initial_control(config.placement, ref.control);
            std::vector<CellMap> panels;
            for (int qo = 1; qo <= config.placement.grid.q_opp_max; ++qo)
                panels.push_back(placement_control_map(config.placement, ctrl, qo, "Q_opp=" + std::to_string(qo)));
            write_text(join(config.output_dir, "control_map.svg"), maps_svg(panels));
            summary["bellman_residual"] = placement_bellman_residual(config.placement, ref);
            break;
        }
        case EnvironmentKind::execution: {
            const auto vbar = solve_execution_reference(config.execution);
            const auto esup = solve_execution_reference_esup(config.execution);
            write_text(join(config.output_dir, "reference.csv"), execution_reference_csv(config.execution, esup));
            write_text(join(config.output_dir, "reference_sup_e.csv"),
                       execution_reference_csv(config.execution, vbar));
            write_text(join(config.output_dir, "value_map.svg"),
                       maps_svg({execution_value_map(config.execution, esup.values, "E[sup] recursion"),
                                 execution_value_map(config.execution, vbar.values, "sup E recursion")}));
            summary["bellman_residual"] = execution_bellman_residual(config.execution, esup, true);
            break;
        }
    }
    summary["out"] = config.output_dir;
    std::cout << summary.dump() << "\n";
    return 0;
}

int cmd_bounds(const CommonOptions& common) {
    const ExperimentConfig config = load_or_default(common);
    validate_config(config);
    ensure_output_dir(config.output_dir);
    Rng rng = make_stream(config.seed, 0);
    const Theorem1Check check = check_theorem1_two_state(config.chain, config.bound_horizon,
                                                         config.bound_replications, config.bound_calibration, rng);
    write_text(join(config.output_dir, "bounds.csv"), theorem1_csv(check));
    std::cout << json{{"status", "ok"},
                      {"B_prime", check.B_prime},
                      {"calibration_horizon", check.calibration_horizon},
                      {"first_violation", check.first_violation},
                      {"B_prime_required", check.B_prime_required},
                      {"out", config.output_dir}}
                     .dump()
              << "\n";
    return 0;
}

int report_error(const std::string& kind, const std::string& message, const json& details = json::array()) {
    std::cerr << json{{"status", "error"}, {"kind", kind}, {"message", message}, {"errors", details}}.dump()
              << "\n";
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive step-size stochastic approximation experiments"};
    app.require_subcommand(1);

    CommonOptions common;
    std::string env;
    std::optional<std::string> algo, policy;
    std::optional<std::int64_t> episodes;
    std::optional<int> paths, workers;
    std::optional<std::uint64_t> seed;

    auto* run = app.add_subcommand("run", "Run learners on an environment and write curves");
    run->add_option("env", env, "drift | placement | execution")->required();
    run->add_option("--algo", algo, "rl | saga | pass | pass_vec");
    run->add_option("--policy", policy, "constant | inv | pc | optimal");
    run->add_option("--episodes", episodes, "episodes (iterations for execution)");
    run->add_option("--paths", paths, "Monte-Carlo paths");
    run->add_option("--seed", seed, "base seed");
    run->add_option("--workers", workers, "worker threads");
    run->add_option("--config", common.config_path, "config file");
    run->add_option("--out", common.out_dir, "output directory");

    auto* ref = app.add_subcommand("reference", "Solve the reference table of an environment");
    ref->add_option("env", env, "drift | placement | execution")->required();
    ref->add_option("--config", common.config_path, "config file");
    ref->add_option("--out", common.out_dir, "output directory");

    auto* bounds = app.add_subcommand("bounds", "Evaluate the error bound on the two-state chain");
    bounds->add_option("--config", common.config_path, "config file");
    bounds->add_option("--out", common.out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report_error("usage", e.what());
    }

    try {
        if (run->parsed()) return cmd_run(env, common, algo, policy, episodes, paths, seed, workers);
        if (ref->parsed()) return cmd_reference(env, common);
        return cmd_bounds(common);
    } catch (const ConfigError& e) {
        json details = json::array();
        for (const auto& issue : e.issues()) details.push_back({{"line", issue.line}, {"message", issue.message}});
        return report_error("config", e.what(), details);
    } catch (const std::invalid_argument& e) {
        // bad algorithm/policy/env names surface here from the factories
        return report_error("usage", e.what());
    } catch (const std::exception& e) {
        return report_error("runtime", e.what());
    }
}
