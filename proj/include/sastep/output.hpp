#pragma once

#include <string>
#include <vector>

#include "sastep/bounds.hpp"
#include "sastep/execution.hpp"
#include "sastep/experiment.hpp"
#include "sastep/placement.hpp"
#include "sastep/reference.hpp"

namespace sastep {

inline constexpr const char* kCsvHeader = "step,metric,value,algo,policy,seed";

// Creates the directory and probes that a file can be written there.
void ensure_output_dir(const std::string& dir);
void write_text(const std::string& path, const std::string& content);

// Shortest representation that parses back to the same double.
std::string format_real(double x);

std::string results_csv(const ResultFrame& frame);

// One polyline per (algo, policy) of <metric>_mean rows on a log10 error axis.
std::string curves_svg(const ResultFrame& frame, const std::string& metric, const std::string& title);

// A grid of coloured, labelled cells. Empty labels mark cells outside the domain.
struct CellMap {
    std::string title;
    std::string x_label;
    std::string y_label;
    int rows = 0;
    int cols = 0;
    std::vector<double> values;       // row-major, row 0 drawn at the bottom
    std::vector<std::string> labels;
    std::vector<std::string> x_ticks;
    std::vector<std::string> y_ticks;
    bool binary = false;              // 0/1 controls: two colours instead of a ramp
};

std::string maps_svg(const std::vector<CellMap>& panels);

// Control map at t = 0 for one ask-queue level: x = Q_before + Q_after, y = Q_before.
CellMap placement_control_map(const LobModel& model, const std::vector<int>& control_t0, int q_opp,
                              const std::string& title);

// Value table over (time, inventory), terminal row included.
CellMap execution_value_map(const ExecModel& model, const std::vector<double>& values,
                            const std::string& title);

std::string drift_reference_csv(const ReferenceTable& ref);
std::string placement_reference_csv(const LobModel& model, const ReferenceTable& ref);
std::string execution_reference_csv(const ExecModel& model, const ReferenceTable& ref);

std::string theorem1_csv(const Theorem1Check& check);

}  // namespace sastep
