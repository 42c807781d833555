#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gridsched/coordination.hpp"
#include "gridsched/workload.hpp"

namespace gridsched {

enum class SchedulerChoice { Fcfs, Ga, Both };
enum class AgentPreset { Three, Five };

struct ExperimentConfig {
    // Exactly one workload source. The generator seed is replaced by the
    // per-run seed.
    std::optional<GenerateOptions> generate;
    std::optional<std::filesystem::path> workload_path;

    SchedulerChoice scheduler = SchedulerChoice::Both;
    AgentPreset agents = AgentPreset::Three;
    std::vector<AgentDescriptor> explicit_agents; // replaces the preset when non-empty
    GaOverrides ga;
    double agent_deadline = 600.0;

    std::size_t repetitions = 1;
    std::uint64_t base_seed = 0;
    std::filesystem::path output_dir = "results";

    bool brute_force = false;       // add an "optimal" row per run
    bool record_timing = false;     // elapsed_ms columns are 0 otherwise
    bool write_run_artifacts = true;
    std::size_t jobs = 1;           // repetitions run on this many threads

    /// Throws InvalidArgument for inconsistent settings.
    void validate() const;
};

struct RunRow {
    std::size_t run = 0;
    std::size_t n_tasks = 0;
    std::size_t n_resources = 0;
    std::string scheduler; // "fcfs", "ga" or "optimal"
    double makespan = 0.0;
    double imbalance = 0.0;
    std::size_t deadline_misses = 0;
    double elapsed_ms = 0.0;
};

struct ExperimentSummary {
    std::vector<RunRow> rows; // ordered by (run, scheduler)
};

/// Runs every repetition with seed base_seed + r and writes summary.csv
/// (plus run_<r>/ artifacts) under output_dir.
ExperimentSummary run_experiment(const ExperimentConfig& config);

struct SweepRow {
    std::size_t n_tasks = 0;
    std::string scheduler;
    double mean_makespan = 0.0;
    double mean_imbalance = 0.0;
    std::optional<double> win_rate;
};

/// One experiment per size (written to output_dir/n<size>/) and a
/// sweep.csv aggregate. win_rate for "ga" is the fraction of runs where the
/// GA makespan is strictly below FCFS; for "fcfs" the reverse; for
/// "optimal" the fraction strictly below FCFS.
std::vector<SweepRow> sweep_group_sizes(const ExperimentConfig& config, const std::vector<std::size_t>& sizes);

void write_summary_csv(std::ostream& out, const ExperimentSummary& summary, bool include_timing);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

} // namespace gridsched
