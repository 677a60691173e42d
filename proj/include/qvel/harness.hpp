#pragma once

// Configuration, reports and sweeps behind the command-line tool.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qvel/integrator.hpp"
#include "qvel/metrics.hpp"
#include "qvel/model.hpp"

namespace qvel {

using json = nlohmann::json;

struct HistoryConfig {
    std::string kind = "antisymmetric";  ///< antisymmetric | uniform | constant
    double epsilon = 0.1;
    std::vector<double> values;          ///< for kind == constant
};

struct SimulateConfig {
    double horizon = 0.0;  ///< 0 selects the default horizon
    int steps_per_delay = 64;
    double window_fraction = 0.25;
    HistoryConfig history;
};

struct AnalyzeConfig {
    int branches = 3;  ///< critical delays k = 0 .. branches-1
};

/// One sweep axis. `name` is a SystemParams field or `delay_offset`, which sets the delay to
/// delta_cr(point) + value.
struct SweepAxis {
    std::string name;
    std::vector<double> values;
};

struct SweepConfig {
    std::vector<SweepAxis> axes;
    bool simulate = false;  ///< fill amp_sim by integrating every point
};

struct RunConfig {
    SystemParams params;
    SimulateConfig simulate;
    AnalyzeConfig analyze;
    SweepConfig sweep;
};

/// Parses and validates a config document. Unknown keys and wrong types raise ConfigError,
/// invalid parameters raise ConfigError carrying the DomainError message.
RunConfig parse_config(const json& doc);
RunConfig parse_config_text(const std::string& text);
json to_json(const RunConfig& cfg);
json to_json(const SystemParams& p);

HistorySegment history_from(const SimulateConfig& sim, const SystemParams& params);

/// Region, critical frequency and delays, design summary and amplitude estimates, each present
/// only when defined for the parameters.
json analyze_report(const SystemParams& params, int branches);

json measurement_json(const OscillationMeasurement& m);

/// `t,q1..qN,dq1..dqN` with 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
json trajectory_json(const Trajectory& traj);

struct SweepRow {
    SystemParams params;
    std::string region;
    std::optional<double> omega_cr, delta_cr0, amp_sim, amp_o1, amp_o2;
    std::string error;
};

/// Outer axis major. Throws ConfigError for an empty grid or more than 10^4 points.
std::vector<SweepRow> run_sweep(const RunConfig& cfg, int threads = 1);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);
json sweep_json(const std::vector<SweepRow>& rows);

/// Shortest-exact formatting used by every CSV writer (17 significant digits).
std::string format_double(double v);

}  // namespace qvel
