#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sastep/config.hpp"
#include "sastep/reference.hpp"

namespace sastep {

struct ResultRow {
    std::int64_t step = 0;
    std::string metric;
    double value = 0.0;
    std::string algo;
    std::string policy;
    std::int64_t seed = 0;

    bool operator==(const ResultRow&) const = default;
};

struct ResultFrame {
    int schema_version = 1;
    std::vector<ResultRow> rows;

    // Orders by (algo, policy, seed, step, metric).
    void sort();
};

struct PathResult {
    RunSpec run;
    int path_index = 0;
    std::int64_t seed = 0;
    std::vector<ResultRow> rows;
    bool aborted = false;
    std::string diagnostic;
    std::vector<double> final_values;
    std::vector<int> final_control;  // placement: learned t = 0 control
};

// References shared by every path of one experiment.
struct ExperimentReferences {
    ReferenceTable primary;    // q* the learner converges to
    ReferenceTable secondary;  // execution: the sup-E recursion; empty otherwise
};

ExperimentReferences build_references(const ExperimentConfig& config);

// Path k runs on make_stream(config.seed, k) and reports seed config.seed + k.
PathResult run_path(const ExperimentConfig& config, const ExperimentReferences& refs,
                    const RunSpec& run, int path_index);

// Per-path rows plus <metric>_mean and <metric>_se rows per step, folded in
// path order whatever order `paths` arrives in. Aborted paths keep their
// diagnostic row and are left out of the means.
ResultFrame aggregate(const ExperimentConfig& config, std::vector<PathResult> paths);

struct ExperimentResult {
    ResultFrame frame;
    ExperimentReferences references;
    std::vector<PathResult> paths;
};

// Runs every configured (algorithm, policy) pair over all paths using
// config.workers threads.
ExperimentResult run_experiment(const ExperimentConfig& config);

// Mean of one aggregated metric at one step; throws when absent.
double frame_value(const ResultFrame& frame, const RunSpec& run, const std::string& metric,
                   std::int64_t step);

// t = 0 control cells of the placement learner/reference.
std::vector<int> placement_initial_control(const LobModel& model, const std::vector<int>& control);

}  // namespace sastep
