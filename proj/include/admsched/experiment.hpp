#pragma once

#include "admsched/dynamics.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace admsched {

/// Invalid configuration; the message names the offending field.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RegionGraphSpec {
    int K = 0;
    std::vector<std::pair<int, int>> edges;
};

struct OutputPaths {
    std::filesystem::path trajectory = "trajectory.csv";
    std::optional<std::filesystem::path> terminal;
    std::optional<std::filesystem::path> diagnostics;
};

struct ExperimentConfig {
    double r = 0.49;                               // space.r
    std::optional<RegionGraphSpec> region_graph;   // space.region_graph (instead of r)
    std::optional<int> K;                          // partition.K
    bool priority = false;                         // scheduler.type
    std::optional<double> zeta;                    // scheduler.zeta
    ArrivalSpec arrivals;
    std::uint64_t slots = 0;
    std::uint64_t seed = 0;
    std::uint64_t thinning = 1;
    OutputPaths outputs;
    bool diagnostics = false;                      // diagnostics.enabled

    AdmissibilityModel model() const;
    Partition partition() const;
    RunSpec run_spec() const;
};

/// Validates every field; unknown keys are rejected. Throws ConfigError.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

struct SweepConfig {
    ExperimentConfig base;
    std::vector<double> lambda_grid;
    std::vector<std::uint64_t> seeds;
    unsigned parallelism = 1;
    std::filesystem::path summary = "sweep_summary.csv";
    std::optional<std::filesystem::path> run_output_dir;  // per-run trajectory CSVs
};

SweepConfig parse_sweep(const nlohmann::json& j);
SweepConfig load_sweep(const std::filesystem::path& path);

struct SweepRow {
    double lambda = 0.0;
    std::uint64_t seed = 0;
    StabilityReport stats;
};

/// Runs every (lambda, seed) pair on up to `parallelism` threads. Rows come
/// back sorted by lambda, then seed, whatever the completion order. A failing
/// run is rethrown as std::runtime_error naming its (lambda, seed).
std::vector<SweepRow> run_sweep(const SweepConfig& sweep);

// CSV writers (LF line endings, fixed headers).
void write_trajectory_csv(std::ostream& os, const RunResult& run);
void write_terminal_csv(std::ostream& os, const Configuration& y);
void write_diagnostics_csv(std::ostream& os, const RunResult& run);
void write_summary_csv(std::ostream& os, const std::vector<SweepRow>& rows);

/// Relative paths resolve under $ADMSCHED_OUTPUT_DIR when it is set.
std::filesystem::path resolve_output(const std::filesystem::path& p);

/// `run`: executes the experiment and writes its CSV files; returns an exit status.
int cmd_run(const ExperimentConfig& config, std::ostream& log);

/// `sweep`: runs the grid and writes the summary CSV; returns an exit status.
int cmd_sweep(const SweepConfig& sweep, std::ostream& log);

} // namespace admsched
