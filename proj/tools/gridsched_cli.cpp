// Experiment runner: FCFS vs. multi-agent GA on generated or file workloads.
//
//   gridsched_cli --generate 100x11 --scheduler both --agents three
//                 --generations 200 --reps 30 --seed 1 --out results
//
// Exit codes: 0 success, 1 usage / invalid configuration, 2 I/O failure.

#include <charconv>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gridsched/errors.hpp"
#include "gridsched/experiment.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;

bool parse_size(std::string_view text, std::size_t& value) {
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

// "NxM" -> (tasks, resources)
bool parse_shape(const std::string& text, std::size_t& tasks, std::size_t& resources) {
    const auto x = text.find_first_of("xX");
    if (x == std::string::npos) {
        return false;
    }
    return parse_size(std::string_view(text).substr(0, x), tasks) &&
           parse_size(std::string_view(text).substr(x + 1), resources) && tasks > 0 && resources > 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Grid task scheduling experiments: FCFS baseline vs. multi-agent genetic algorithm"};
    app.set_version_flag("--version", "gridsched 1.0");

    std::string shape;
    std::string workload_path;
    std::string scheduler = "both";
    std::string agents = "three";
    std::optional<std::size_t> generations;
    std::optional<std::size_t> population;
    std::size_t reps = 1;
    std::uint64_t seed = 0;
    std::string out_dir = "results";
    bool brute_force = false;
    std::vector<std::size_t> sweep;
    std::vector<double> cost_range{10.0, 100.0};
    double heterogeneity = 0.5;
    std::optional<double> deadline_slack;
    bool timing = false;
    std::size_t jobs = 1;
    double agent_timeout = 600.0;

    auto* gen_opt = app.add_option("--generate", shape, "Generate N tasks on M resources, e.g. 100x11");
    auto* file_opt = app.add_option("--workload", workload_path, "Load the workload from a file")
                         ->check(CLI::ExistingFile);
    gen_opt->excludes(file_opt);
    app.add_option("--scheduler", scheduler, "Schedulers to run")
        ->check(CLI::IsMember({"fcfs", "ga", "both"}))
        ->capture_default_str();
    app.add_option("--agents", agents, "Agent preset")->check(CLI::IsMember({"three", "five"}))->capture_default_str();
    app.add_option("--generations", generations, "GA generations per agent (default 200)");
    app.add_option("--population", population, "GA population size (default 50)");
    app.add_option("--reps", reps, "Repetitions; run r uses seed S + r")->capture_default_str();
    app.add_option("--seed", seed, "Base seed")->capture_default_str();
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    app.add_flag("--brute-force", brute_force, "Add the exhaustive optimum (needs M^N <= 10^6)");
    app.add_option("--sweep", sweep, "Task-group sizes to sweep, e.g. 50,60,70,80,90,100")->delimiter(',');
    app.add_option("--cost-range", cost_range, "Task cost range LO,HI")->delimiter(',')->expected(2)
        ->capture_default_str();
    app.add_option("--heterogeneity", heterogeneity, "Resource speeds drawn from [1, 1+H]")->capture_default_str();
    app.add_option("--deadline-slack", deadline_slack, "Give each task deadline = slack * cost / mean speed");
    app.add_flag("--timing", timing, "Record wall-clock elapsed_ms (output is then not reproducible)");
    app.add_option("--jobs", jobs, "Repetitions run concurrently")->capture_default_str();
    app.add_option("--agent-timeout", agent_timeout, "Seconds the broker waits for each agent")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    gridsched::ExperimentConfig config;
    if (!shape.empty()) {
        gridsched::GenerateOptions gen;
        if (!parse_shape(shape, gen.n_tasks, gen.n_resources)) {
            std::cerr << "error: --generate expects NxM with positive N and M, got '" << shape << "'\n";
            return kExitUsage;
        }
        gen.cost_lo = cost_range[0];
        gen.cost_hi = cost_range[1];
        gen.heterogeneity = heterogeneity;
        gen.deadline_slack = deadline_slack;
        config.generate = gen;
    } else if (!workload_path.empty()) {
        config.workload_path = workload_path;
    } else {
        std::cerr << "error: one of --generate or --workload is required\n";
        return kExitUsage;
    }

    config.scheduler = scheduler == "fcfs" ? gridsched::SchedulerChoice::Fcfs
                       : scheduler == "ga" ? gridsched::SchedulerChoice::Ga
                                           : gridsched::SchedulerChoice::Both;
    config.agents = agents == "five" ? gridsched::AgentPreset::Five : gridsched::AgentPreset::Three;
    config.ga.generations = generations;
    config.ga.population_size = population;
    config.repetitions = reps;
    config.base_seed = seed;
    config.output_dir = out_dir;
    config.brute_force = brute_force;
    config.record_timing = timing;
    config.jobs = jobs;
    config.agent_deadline = agent_timeout;

    try {
        if (!sweep.empty()) {
            gridsched::sweep_group_sizes(config, sweep);
            std::cout << "wrote " << (config.output_dir / "sweep.csv").string() << '\n';
        } else {
            const auto summary = gridsched::run_experiment(config);
            std::cout << "wrote " << summary.rows.size() << " rows to "
                      << (config.output_dir / "summary.csv").string() << '\n';
        }
    } catch (const gridsched::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const gridsched::CapacityExhausted& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const gridsched::ParseError& e) {
        std::cerr << "error: workload: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return 0;
}
