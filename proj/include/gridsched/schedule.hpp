#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "gridsched/workload.hpp"

namespace gridsched {

/// Task-to-resource assignment; also the GA chromosome. Gene t is the
/// resource that executes task t. Each resource runs its tasks in ascending
/// task-id order.
struct Schedule {
    std::vector<ResourceId> assignment;

    std::size_t size() const noexcept { return assignment.size(); }

    /// Tasks of each resource in dispatch order.
    std::vector<std::vector<TaskId>> dispatch_order(std::size_t n_resources) const;

    bool operator==(const Schedule&) const = default;
};

/// Throws InvalidSchedule if the schedule does not fit the workload.
void validate_schedule(const Schedule& schedule, const Workload& workload);

struct FitnessWeights {
    double makespan = 1.0;
    double imbalance = 0.5;
    double tardiness = 10.0;

    void validate() const;
};

struct ScheduleMetrics {
    double makespan = 0.0;
    std::vector<double> loads; // busy time per resource
    double imbalance = 0.0;    // max(loads) - mean(loads)
    std::size_t deadline_misses = 0;
    double tardiness = 0.0;
    double fitness = 0.0;
    std::vector<double> finish_times; // per task
};

/// Replays every resource queue in dispatch order: a task starts at
/// max(resource free time, arrival) and runs for cost / speed.
/// Capacity limits do not affect timing under in-order dispatch.
ScheduleMetrics evaluate(const Schedule& schedule, const Workload& workload,
                         const FitnessWeights& weights = {});

/// Load imbalance of a load vector, exactly 0 when all loads are equal.
double load_imbalance(const std::vector<double>& loads);

/// First come, first served: tasks in (arrival, id) order go to the resource
/// that becomes free earliest (lowest id on ties), skipping resources whose
/// queue is at capacity at the task's arrival. Throws CapacityExhausted when
/// every resource is full.
Schedule fcfs_schedule(const Workload& workload);

/// Minimum-makespan schedule by exhaustive enumeration of all m^n
/// assignments (ties: lexicographically smallest assignment). Throws
/// InvalidArgument when m^n exceeds max_assignments.
Schedule exhaustive_optimum(const Workload& workload, std::size_t max_assignments = 1'000'000);

/// Number of assignments exhaustive_optimum would visit, saturating at
/// SIZE_MAX.
std::size_t assignment_space_size(std::size_t n_tasks, std::size_t n_resources);

// "task <id> -> resource <id>" lines, then a "# metrics" block.
void write_schedule(std::ostream& out, const Schedule& schedule, const ScheduleMetrics& metrics);

} // namespace gridsched
