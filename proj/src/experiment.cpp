#include "gridsched/experiment.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <map>
#include <ostream>
#include <thread>

#include "gridsched/errors.hpp"
#include "gridsched/simulator.hpp"

namespace gridsched {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kBruteForceLimit = 1'000'000;

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void ensure_directory(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    }
}

template <typename Writer>
void write_file(const fs::path& path, Writer&& writer) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    writer(out);
    out.flush();
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

bool wants_fcfs(SchedulerChoice s) { return s != SchedulerChoice::Ga; }
bool wants_ga(SchedulerChoice s) { return s != SchedulerChoice::Fcfs; }

std::vector<RunRow> run_once(const ExperimentConfig& config, std::size_t run) {
    const std::uint64_t seed = config.base_seed + run;
    Workload workload;
    if (config.generate) {
        GenerateOptions options = *config.generate;
        options.seed = seed;
        workload = generate_workload(options);
    } else {
        try {
            workload = load_workload(*config.workload_path);
        } catch (const std::system_error& e) {
            throw IoError(e.what());
        }
        workload.validate();
    }
    const std::size_t n = workload.task_count();
    const std::size_t m = workload.resource_count();
    if (config.brute_force && assignment_space_size(n, m) > kBruteForceLimit) {
        throw InvalidArgument("--brute-force needs n_resources^n_tasks <= 10^6");
    }

    const fs::path run_dir = config.output_dir / ("run_" + std::to_string(run));
    if (config.write_run_artifacts) {
        ensure_directory(run_dir);
        write_file(run_dir / "workload.txt", [&](std::ostream& out) { write_workload(out, workload); });
    }

    const FitnessWeights weights = config.ga.weights.value_or(FitnessWeights{});
    std::vector<RunRow> rows;
    const auto make_row = [&](std::string name, const Schedule& schedule, double elapsed,
                              const std::string& prefix) {
        const ScheduleMetrics metrics = evaluate(schedule, workload, weights);
        const ExecutionTrace trace = simulate(schedule, workload);
        const DeadlineReport deadlines = check_deadlines(trace, workload);
        if (config.write_run_artifacts) {
            write_file(run_dir / (prefix + "_schedule.txt"),
                       [&](std::ostream& out) { write_schedule(out, schedule, metrics); });
            write_file(run_dir / (prefix + "_trace.csv"), [&](std::ostream& out) { write_trace_csv(out, trace); });
            write_file(run_dir / (prefix + "_events.log"), [&](std::ostream& out) { write_event_log(out, trace); });
        }
        rows.push_back(RunRow{run, n, m, std::move(name), trace.simulated_makespan, metrics.imbalance,
                              deadlines.misses, config.record_timing ? elapsed : 0.0});
    };

    if (wants_fcfs(config.scheduler)) {
        const auto start = Clock::now();
        const Schedule schedule = fcfs_schedule(workload);
        make_row("fcfs", schedule, ms_since(start), "fcfs");
    }

    if (wants_ga(config.scheduler)) {
        std::vector<AgentDescriptor> agents = config.explicit_agents;
        if (agents.empty()) {
            agents = config.agents == AgentPreset::Three ? three_agent_preset(seed) : five_agent_preset(seed);
        }
        AgentPool pool = spawn_agents(std::move(agents));
        ScheduleRequest request;
        request.request_id = run;
        request.workload = workload;
        request.ga_overrides = config.ga;
        request.agent_deadline = config.agent_deadline;
        const auto start = Clock::now();
        const BrokerOutcome outcome = pool.schedule_batch(request);
        const double elapsed = ms_since(start);
        pool.shutdown();

        if (config.write_run_artifacts) {
            write_file(run_dir / "broker_outcome.csv",
                       [&](std::ostream& out) { write_outcome_csv(out, outcome, config.record_timing); });
            for (const AgentReport& r : outcome.per_agent) {
                if (outcome.winner_agent && r.agent_id == *outcome.winner_agent) {
                    write_file(run_dir / "ga_history.csv",
                               [&](std::ostream& out) { write_history_csv(out, *r.result); });
                }
            }
        }
        make_row("ga", outcome.winner, elapsed, "ga");
    }

    if (config.brute_force) {
        const auto start = Clock::now();
        const Schedule schedule = exhaustive_optimum(workload, kBruteForceLimit);
        make_row("optimal", schedule, ms_since(start), "optimal");
    }
    return rows;
}

} // namespace

void ExperimentConfig::validate() const {
    if (generate.has_value() == workload_path.has_value()) {
        throw InvalidArgument("exactly one of a generated or a file workload is required");
    }
    if (repetitions < 1) {
        throw InvalidArgument("repetitions must be >= 1");
    }
    if (jobs < 1) {
        throw InvalidArgument("jobs must be >= 1");
    }
    if (!(agent_deadline > 0.0)) {
        throw InvalidArgument("agent deadline must be positive");
    }
    if (generate) {
        if (generate->n_tasks == 0 || generate->n_resources == 0) {
            throw InvalidArgument("generated workload needs at least one task and one resource");
        }
        if (brute_force && assignment_space_size(generate->n_tasks, generate->n_resources) > kBruteForceLimit) {
            throw InvalidArgument("--brute-force needs n_resources^n_tasks <= 10^6");
        }
    }
    if (output_dir.empty()) {
        throw InvalidArgument("output directory is required");
    }
    if (wants_ga(scheduler)) {
        GaConfig probe = ga.apply(GaConfig{});
        probe.init = InitDistribution::defaults_for(DistributionKind::Uniform, 1);
        probe.validate();
    }
}

ExperimentSummary run_experiment(const ExperimentConfig& config) {
    config.validate();
    ensure_directory(config.output_dir);

    std::vector<std::vector<RunRow>> per_run(config.repetitions);
    std::vector<std::exception_ptr> errors(config.repetitions);
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t r = next++; r < config.repetitions; r = next++) {
            try {
                per_run[r] = run_once(config, r);
            } catch (...) {
                errors[r] = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::min(config.jobs, config.repetitions);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < threads; ++i) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }

    ExperimentSummary summary;
    for (auto& rows : per_run) {
        for (auto& row : rows) {
            summary.rows.push_back(std::move(row));
        }
    }
    write_file(config.output_dir / "summary.csv",
               [&](std::ostream& out) { write_summary_csv(out, summary, config.record_timing); });
    return summary;
}

std::vector<SweepRow> sweep_group_sizes(const ExperimentConfig& config, const std::vector<std::size_t>& sizes) {
    if (sizes.empty()) {
        throw InvalidArgument("sweep needs at least one group size");
    }
    if (!config.generate) {
        throw InvalidArgument("sweep needs a generated workload");
    }
    for (std::size_t size : sizes) {
        if (size < 1) {
            throw InvalidArgument("sweep group sizes must be >= 1");
        }
    }

    std::vector<SweepRow> table;
    for (std::size_t size : sizes) {
        ExperimentConfig sized = config;
        sized.generate->n_tasks = size;
        sized.output_dir = config.output_dir / ("n" + std::to_string(size));
        const ExperimentSummary summary = run_experiment(sized);

        // makespan per (scheduler, run)
        std::map<std::string, std::map<std::size_t, double>> makespans;
        std::map<std::string, std::pair<double, double>> sums;
        for (const RunRow& row : summary.rows) {
            makespans[row.scheduler][row.run] = row.makespan;
            sums[row.scheduler].first += row.makespan;
            sums[row.scheduler].second += row.imbalance;
        }
        const auto beats = [&](const std::string& a, const std::string& b) -> std::optional<double> {
            if (!makespans.count(a) || !makespans.count(b)) {
                return std::nullopt;
            }
            std::size_t wins = 0;
            for (const auto& [run, value] : makespans[a]) {
                if (value < makespans[b].at(run)) {
                    ++wins;
                }
            }
            return static_cast<double>(wins) / static_cast<double>(makespans[a].size());
        };

        for (const auto& [name, sum] : sums) {
            const double count = static_cast<double>(makespans[name].size());
            SweepRow row;
            row.n_tasks = size;
            row.scheduler = name;
            row.mean_makespan = sum.first / count;
            row.mean_imbalance = sum.second / count;
            row.win_rate = name == "fcfs" ? beats("fcfs", "ga") : beats(name, "fcfs");
            table.push_back(std::move(row));
        }
    }

    ensure_directory(config.output_dir);
    write_file(config.output_dir / "sweep.csv", [&](std::ostream& out) { write_sweep_csv(out, table); });
    return table;
}

void write_summary_csv(std::ostream& out, const ExperimentSummary& summary, bool include_timing) {
    out << "run,n_tasks,n_resources,scheduler,makespan,imbalance,deadline_misses,elapsed_ms\n";
    for (const RunRow& r : summary.rows) {
        out << r.run << ',' << r.n_tasks << ',' << r.n_resources << ',' << r.scheduler << ','
            << format_real(r.makespan) << ',' << format_real(r.imbalance) << ',' << r.deadline_misses << ','
            << (include_timing ? format_real(r.elapsed_ms) : std::string("0")) << '\n';
    }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "n_tasks,scheduler,mean_makespan,mean_imbalance,win_rate\n";
    for (const SweepRow& r : rows) {
        out << r.n_tasks << ',' << r.scheduler << ',' << format_real(r.mean_makespan) << ','
            << format_real(r.mean_imbalance) << ',' << (r.win_rate ? format_real(*r.win_rate) : std::string())
            << '\n';
    }
}

} // namespace gridsched
