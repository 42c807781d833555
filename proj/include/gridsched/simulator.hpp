#pragma once

#include <cstddef>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "gridsched/schedule.hpp"
#include "gridsched/workload.hpp"

namespace gridsched {

// Declaration order is the tie-break order for simultaneous events.
enum class EventKind { Dispatch = 0, Start = 1, Finish = 2 };

std::string_view to_string(EventKind kind);

struct TaskRecord {
    TaskId task = 0;
    ResourceId resource = 0;
    double start = 0.0;
    double finish = 0.0;
    bool met_deadline = true;
};

struct TraceEvent {
    double time = 0.0;
    EventKind kind = EventKind::Dispatch;
    TaskId task = 0;
    ResourceId resource = 0;

    bool operator==(const TraceEvent&) const = default;
};

struct ExecutionTrace {
    std::vector<TaskRecord> records; // indexed by task id
    double simulated_makespan = 0.0;
    std::vector<TraceEvent> events; // by (time, task, kind)
};

/// Discrete-event replay of a schedule. Tasks reach their resource's queue
/// in dispatch order once they have arrived and the queue has a free slot
/// (tasks blocked by a full queue wait in a pending set); each resource runs
/// its queue FIFO, one task at a time.
ExecutionTrace simulate(const Schedule& schedule, const Workload& workload);

struct DeadlineReport {
    std::size_t misses = 0;
    double tardiness = 0.0;

    bool operator==(const DeadlineReport&) const = default;
};

DeadlineReport check_deadlines(const ExecutionTrace& trace, const Workload& workload);

// task,resource,start,finish,met_deadline
void write_trace_csv(std::ostream& out, const ExecutionTrace& trace);
// t=<time> <kind> task=<id> res=<id>
void write_event_log(std::ostream& out, const ExecutionTrace& trace);

} // namespace gridsched
