#include "gridsched/simulator.hpp"

#include <algorithm>
#include <functional>
#include <ostream>
#include <queue>
#include <tuple>

namespace gridsched {

std::string_view to_string(EventKind kind) {
    switch (kind) {
    case EventKind::Dispatch: return "dispatch";
    case EventKind::Start: return "start";
    case EventKind::Finish: return "finish";
    }
    return "unknown";
}

namespace {

struct ResourceState {
    std::vector<TaskId> queue; // dispatch order
    std::size_t dispatched = 0;
    std::size_t started = 0;
    std::size_t occupancy = 0; // dispatched but not finished
    bool busy = false;
    double busy_until = 0.0;
};

} // namespace

ExecutionTrace simulate(const Schedule& schedule, const Workload& workload) {
    validate_schedule(schedule, workload);

    const std::size_t n = workload.task_count();
    const std::size_t m = workload.resource_count();

    ExecutionTrace trace;
    trace.records.resize(n);
    trace.events.reserve(3 * n);

    std::vector<ResourceState> state(m);
    {
        auto queues = schedule.dispatch_order(m);
        for (std::size_t r = 0; r < m; ++r) {
            state[r].queue = std::move(queues[r]);
        }
    }

    std::priority_queue<double, std::vector<double>, std::greater<>> wakeups;
    for (const Task& t : workload.tasks) {
        wakeups.push(t.arrival);
    }

    while (!wakeups.empty()) {
        const double now = wakeups.top();
        while (!wakeups.empty() && wakeups.top() == now) {
            wakeups.pop();
        }

        for (std::size_t r = 0; r < m; ++r) {
            ResourceState& rs = state[r];
            if (rs.busy && rs.busy_until == now) {
                const TaskId done = rs.queue[rs.started - 1];
                trace.events.push_back({now, EventKind::Finish, done, static_cast<ResourceId>(r)});
                rs.busy = false;
                --rs.occupancy;
            }
        }

        for (std::size_t r = 0; r < m; ++r) {
            ResourceState& rs = state[r];
            const auto& capacity = workload.resources[r].capacity;
            while (rs.dispatched < rs.queue.size() && workload.tasks[rs.queue[rs.dispatched]].arrival <= now &&
                   (!capacity || rs.occupancy < *capacity)) {
                trace.events.push_back(
                    {now, EventKind::Dispatch, rs.queue[rs.dispatched], static_cast<ResourceId>(r)});
                ++rs.dispatched;
                ++rs.occupancy;
            }
            if (!rs.busy && rs.started < rs.dispatched) {
                const TaskId id = rs.queue[rs.started++];
                const Task& task = workload.tasks[id];
                TaskRecord& rec = trace.records[id];
                rec.task = id;
                rec.resource = static_cast<ResourceId>(r);
                rec.start = now;
                rec.finish = now + task.cost / workload.resources[r].speed;
                rec.met_deadline = !task.deadline || rec.finish <= *task.deadline;
                trace.events.push_back({now, EventKind::Start, id, static_cast<ResourceId>(r)});
                rs.busy = true;
                rs.busy_until = rec.finish;
                wakeups.push(rec.finish);
                trace.simulated_makespan = std::max(trace.simulated_makespan, rec.finish);
            }
        }
    }

    std::stable_sort(trace.events.begin(), trace.events.end(), [](const TraceEvent& a, const TraceEvent& b) {
        return std::tuple(a.time, a.task, static_cast<int>(a.kind)) <
               std::tuple(b.time, b.task, static_cast<int>(b.kind));
    });
    return trace;
}

DeadlineReport check_deadlines(const ExecutionTrace& trace, const Workload& workload) {
    DeadlineReport report;
    for (const TaskRecord& rec : trace.records) {
        const Task& task = workload.tasks.at(rec.task);
        if (task.deadline && rec.finish > *task.deadline) {
            ++report.misses;
            report.tardiness += rec.finish - *task.deadline;
        }
    }
    return report;
}

void write_trace_csv(std::ostream& out, const ExecutionTrace& trace) {
    out << "task,resource,start,finish,met_deadline\n";
    for (const TaskRecord& rec : trace.records) {
        out << rec.task << ',' << rec.resource << ',' << format_real(rec.start) << ',' << format_real(rec.finish)
            << ',' << (rec.met_deadline ? "true" : "false") << '\n';
    }
}

void write_event_log(std::ostream& out, const ExecutionTrace& trace) {
    for (const TraceEvent& e : trace.events) {
        out << "t=" << format_real(e.time) << ' ' << to_string(e.kind) << " task=" << e.task
            << " res=" << e.resource << '\n';
    }
}

} // namespace gridsched
