#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gridsched {

using TaskId = std::uint32_t;
using ResourceId = std::uint32_t;

struct Task {
    TaskId id = 0;
    double cost = 1.0;    // abstract work units, > 0
    double arrival = 0.0; // time units, >= 0
    std::optional<double> deadline; // > arrival when set

    bool operator==(const Task&) const = default;
};

struct Resource {
    ResourceId id = 0;
    double speed = 1.0; // work units per time unit, > 0
    std::optional<std::uint32_t> capacity; // max tasks queued at once, >= 1

    bool operator==(const Resource&) const = default;
};

struct Workload {
    std::vector<Task> tasks;
    std::vector<Resource> resources;
    std::uint64_t seed = 0;

    std::size_t task_count() const noexcept { return tasks.size(); }
    std::size_t resource_count() const noexcept { return resources.size(); }

    /// Throws InvalidArgument naming the first violated invariant.
    void validate() const;

    bool operator==(const Workload&) const = default;
};

struct GenerateOptions {
    std::size_t n_tasks = 100;
    std::size_t n_resources = 11;
    double cost_lo = 10.0;
    double cost_hi = 100.0;
    double heterogeneity = 0.5;
    std::optional<double> deadline_slack;
    std::uint64_t seed = 0;
};

/// Costs uniform in [cost_lo, cost_hi], speeds uniform in
/// [1, 1 + heterogeneity], arrivals 0. With a deadline slack each task gets
/// deadline = arrival + slack * cost / mean_speed.
Workload generate_workload(const GenerateOptions& options);

// Text format, one record per line:
//   workload v1 seed=<u64>
//   resource <id> <speed> [capacity=<k>]
//   task <id> <cost> <arrival> [deadline=<d>]
// Reals are written in shortest round-trip form.
void write_workload(std::ostream& out, const Workload& workload);
Workload read_workload(std::istream& in);

void save_workload(const Workload& workload, const std::filesystem::path& path);
Workload load_workload(const std::filesystem::path& path);

/// Shortest decimal form that parses back to the same double.
std::string format_real(double value);

} // namespace gridsched
