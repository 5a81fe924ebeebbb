#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sastep/bounds.hpp"
#include "sastep/drift.hpp"
#include "sastep/engine.hpp"
#include "sastep/execution.hpp"
#include "sastep/placement.hpp"

namespace sastep {

enum class EnvironmentKind { drift, placement, execution };

struct RunSpec {
    Algorithm algorithm = Algorithm::pass;
    ScheduleKind policy = ScheduleKind::piecewise_constant;
    bool operator==(const RunSpec&) const = default;
};

struct ExperimentConfig {
    EnvironmentKind environment = EnvironmentKind::drift;
    EngineConfig engine;              // algorithm and step-size kind come from `runs`
    std::vector<RunSpec> runs{{}};    // compared side by side
    std::int64_t episodes = 1000;     // drift / placement
    int paths = 100;
    std::uint64_t seed = 0;
    int workers = 1;
    std::int64_t cadence = 0;         // episodes (drift, placement) or updates (execution); 0 = default
    double saga_c = 1.0;              // analysis constant in the SAGA error

    DriftModel drift;
    LobModel placement;
    ExecModel execution;
    ExecRunOptions exec_run;

    TwoStateChain chain;
    int bound_horizon = 200;
    int bound_replications = 20000;
    int bound_calibration = 10;

    std::string output_dir = "out";
};

struct ConfigIssue {
    int line = 0;  // 0 for whole-file problems
    std::string message;
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<ConfigIssue> issues);
    const std::vector<ConfigIssue>& issues() const { return issues_; }

private:
    std::vector<ConfigIssue> issues_;
};

// Sectioned key = value text; '#' starts a comment. Throws ConfigError listing
// every problem found.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Writes every key, so parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const ExperimentConfig& config);

// Every episode for drift and placement, every 100 updates for execution, unless set.
std::int64_t effective_cadence(const ExperimentConfig& config);

// Checks cross-field constraints; throws ConfigError.
void validate_config(const ExperimentConfig& config);

std::string to_string(Algorithm a);
std::string to_string(ScheduleKind k);
std::string to_string(EnvironmentKind e);
Algorithm parse_algorithm(const std::string& s);
ScheduleKind parse_policy(const std::string& s);
EnvironmentKind parse_environment(const std::string& s);

std::size_t edit_distance(const std::string& a, const std::string& b);

}  // namespace sastep
