#include "gridsched/schedule.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <ostream>

#include "gridsched/errors.hpp"

namespace gridsched {

std::vector<std::vector<TaskId>> Schedule::dispatch_order(std::size_t n_resources) const {
    std::vector<std::vector<TaskId>> queues(n_resources);
    for (std::size_t t = 0; t < assignment.size(); ++t) {
        queues.at(assignment[t]).push_back(static_cast<TaskId>(t));
    }
    return queues;
}

void validate_schedule(const Schedule& schedule, const Workload& workload) {
    if (schedule.size() != workload.task_count()) {
        throw InvalidSchedule("schedule has " + std::to_string(schedule.size()) + " genes, workload has " +
                              std::to_string(workload.task_count()) + " tasks");
    }
    const std::size_t m = workload.resource_count();
    for (std::size_t t = 0; t < schedule.size(); ++t) {
        if (schedule.assignment[t] >= m) {
            throw InvalidSchedule("task " + std::to_string(t) + " assigned to resource " +
                                  std::to_string(schedule.assignment[t]) + ", only " + std::to_string(m) +
                                  " resources exist");
        }
    }
}

void FitnessWeights::validate() const {
    if (!(makespan > 0.0)) {
        throw InvalidArgument("makespan weight must be positive");
    }
    if (!(imbalance >= 0.0) || !(tardiness >= 0.0)) {
        throw InvalidArgument("fitness weights must be non-negative");
    }
}

double load_imbalance(const std::vector<double>& loads) {
    if (loads.empty()) {
        return 0.0;
    }
    const auto [lo, hi] = std::minmax_element(loads.begin(), loads.end());
    if (*lo == *hi) {
        return 0.0;
    }
    const double mean = std::accumulate(loads.begin(), loads.end(), 0.0) / static_cast<double>(loads.size());
    return std::max(0.0, *hi - mean);
}

ScheduleMetrics evaluate(const Schedule& schedule, const Workload& workload, const FitnessWeights& weights) {
    validate_schedule(schedule, workload);

    const std::size_t m = workload.resource_count();
    ScheduleMetrics metrics;
    metrics.loads.assign(m, 0.0);
    metrics.finish_times.assign(workload.task_count(), 0.0);
    std::vector<double> free_at(m, 0.0);

    // Visiting tasks by ascending id walks every resource queue in dispatch
    // order; simulate() accumulates in the same order so results match bit
    // for bit.
    for (std::size_t t = 0; t < workload.task_count(); ++t) {
        const Task& task = workload.tasks[t];
        const ResourceId r = schedule.assignment[t];
        const double start = std::max(free_at[r], task.arrival);
        const double duration = task.cost / workload.resources[r].speed;
        free_at[r] = start + duration;
        metrics.loads[r] += duration;
        metrics.finish_times[t] = free_at[r];
        metrics.makespan = std::max(metrics.makespan, free_at[r]);
    }

    for (std::size_t t = 0; t < workload.task_count(); ++t) {
        const Task& task = workload.tasks[t];
        if (task.deadline && metrics.finish_times[t] > *task.deadline) {
            ++metrics.deadline_misses;
            metrics.tardiness += metrics.finish_times[t] - *task.deadline;
        }
    }

    metrics.imbalance = load_imbalance(metrics.loads);
    metrics.fitness = weights.makespan * metrics.makespan + weights.imbalance * metrics.imbalance +
                      weights.tardiness * metrics.tardiness;
    return metrics;
}

Schedule fcfs_schedule(const Workload& workload) {
    const std::size_t n = workload.task_count();
    const std::size_t m = workload.resource_count();
    if (m == 0) {
        throw InvalidArgument("fcfs_schedule: workload has no resources");
    }

    std::vector<TaskId> order(n);
    std::iota(order.begin(), order.end(), TaskId{0});
    std::stable_sort(order.begin(), order.end(), [&](TaskId a, TaskId b) {
        return workload.tasks[a].arrival < workload.tasks[b].arrival;
    });

    Schedule schedule;
    schedule.assignment.assign(n, 0);
    std::vector<double> free_at(m, 0.0);
    // Projected finish times of tasks placed on each resource; only needed
    // for capacity checks.
    std::vector<std::vector<double>> queued(m);

    for (TaskId t : order) {
        const Task& task = workload.tasks[t];
        std::size_t best = m;
        for (std::size_t r = 0; r < m; ++r) {
            if (const auto& cap = workload.resources[r].capacity) {
                const auto busy = std::count_if(queued[r].begin(), queued[r].end(),
                                                [&](double finish) { return finish > task.arrival; });
                if (static_cast<std::size_t>(busy) >= *cap) {
                    continue;
                }
            }
            if (best == m || free_at[r] < free_at[best]) {
                best = r;
            }
        }
        if (best == m) {
            throw CapacityExhausted("fcfs_schedule: all resources at capacity when placing task " +
                                    std::to_string(t));
        }
        free_at[best] = std::max(free_at[best], task.arrival) + task.cost / workload.resources[best].speed;
        if (workload.resources[best].capacity) {
            queued[best].push_back(free_at[best]);
        }
        schedule.assignment[t] = static_cast<ResourceId>(best);
    }
    return schedule;
}

std::size_t assignment_space_size(std::size_t n_tasks, std::size_t n_resources) {
    std::size_t total = 1;
    for (std::size_t i = 0; i < n_tasks; ++i) {
        if (n_resources != 0 && total > std::numeric_limits<std::size_t>::max() / n_resources) {
            return std::numeric_limits<std::size_t>::max();
        }
        total *= n_resources;
    }
    return total;
}

Schedule exhaustive_optimum(const Workload& workload, std::size_t max_assignments) {
    const std::size_t n = workload.task_count();
    const std::size_t m = workload.resource_count();
    if (assignment_space_size(n, m) > max_assignments) {
        throw InvalidArgument("exhaustive_optimum: " + std::to_string(m) + "^" + std::to_string(n) +
                              " assignments exceed the limit of " + std::to_string(max_assignments));
    }

    std::vector<ResourceId> current(n, 0);
    Schedule best{current};
    double best_makespan = std::numeric_limits<double>::infinity();
    std::vector<double> free_at(m);

    for (;;) {
        std::fill(free_at.begin(), free_at.end(), 0.0);
        double makespan = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const ResourceId r = current[t];
            const Task& task = workload.tasks[t];
            free_at[r] = std::max(free_at[r], task.arrival) + task.cost / workload.resources[r].speed;
            makespan = std::max(makespan, free_at[r]);
        }
        if (makespan < best_makespan) {
            best_makespan = makespan;
            best.assignment = current;
        }

        // Odometer increment, last gene fastest, so the first optimum found
        // is the lexicographically smallest.
        std::size_t pos = n;
        while (pos > 0) {
            --pos;
            if (++current[pos] < m) {
                break;
            }
            current[pos] = 0;
            if (pos == 0) {
                return best;
            }
        }
        if (n == 0) {
            return best;
        }
    }
}

void write_schedule(std::ostream& out, const Schedule& schedule, const ScheduleMetrics& metrics) {
    for (std::size_t t = 0; t < schedule.size(); ++t) {
        out << "task " << t << " -> resource " << schedule.assignment[t] << '\n';
    }
    out << "# metrics\n";
    out << "makespan " << format_real(metrics.makespan) << '\n';
    out << "imbalance " << format_real(metrics.imbalance) << '\n';
    out << "fitness " << format_real(metrics.fitness) << '\n';
}

} // namespace gridsched
