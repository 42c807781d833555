#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gridsched/ga.hpp"
#include "gridsched/schedule.hpp"
#include "gridsched/workload.hpp"

namespace gridsched {

using AgentId = std::uint32_t;

/// One scheduling agent: a GA run with its own initial-population
/// distribution and seed. Without explicit parameters the distribution uses
/// InitDistribution::defaults_for(kind, m) for the request's resource count.
struct AgentDescriptor {
    AgentId agent_id = 0;
    DistributionKind kind = DistributionKind::Uniform;
    std::optional<InitDistribution> init;
    std::uint64_t seed = 0;
};

/// Poisson / Normal / Uniform, seeds derived from base_seed.
std::vector<AgentDescriptor> three_agent_preset(std::uint64_t base_seed);
/// One agent per distribution kind.
std::vector<AgentDescriptor> five_agent_preset(std::uint64_t base_seed);

/// GA settings a request may override; unset fields keep GaConfig defaults.
struct GaOverrides {
    std::optional<std::size_t> population_size;
    std::optional<std::size_t> generations;
    std::optional<double> crossover_rate;
    std::optional<double> mutation_rate;
    std::optional<std::size_t> tournament_size;
    std::optional<std::size_t> elite_count;
    std::optional<FitnessWeights> weights;

    GaConfig apply(GaConfig base) const;
};

struct ScheduleRequest {
    std::uint64_t request_id = 0;
    Workload workload;
    GaOverrides ga_overrides;
    double agent_deadline = 60.0; // wall-clock seconds per agent
};

/// GaConfig an agent runs for a request.
GaConfig agent_config(const AgentDescriptor& agent, const ScheduleRequest& request);

enum class AgentStatus { Ok, Failed, Timeout };
std::string_view to_string(AgentStatus status);

struct AgentReport {
    AgentId agent_id = 0;
    AgentStatus status = AgentStatus::Failed;
    std::optional<GaResult> result; // set when status is Ok
    double elapsed_ms = 0.0;
    std::string error;
};

struct BrokerOutcome {
    std::uint64_t request_id = 0;
    Schedule winner;
    ScheduleMetrics winner_metrics;
    std::optional<AgentId> winner_agent; // empty when the FCFS fallback won
    std::vector<AgentReport> per_agent;  // ascending agent id
    bool fallback_used = false;
    double elapsed_ms = 0.0;
};

enum class Fault {
    None,
    Crash, // worker exits; every later request to it fails
    Hang,  // worker accepts requests but never answers until the fault is cleared
};

struct PoolOptions {
    // false: agents run one after another on the caller's thread.
    bool concurrent = true;
};

/// Broker plus its scheduling agents. Agents share nothing mutable; the
/// broker hands each one an immutable request and collects its report.
/// schedule_batch must be driven by one control thread at a time.
class AgentPool {
public:
    AgentPool(std::vector<AgentDescriptor> descriptors, PoolOptions options = {});
    AgentPool(AgentPool&&) noexcept;
    AgentPool& operator=(AgentPool&&) noexcept;
    ~AgentPool();

    /// Runs every agent on the request and keeps the lowest-fitness result
    /// (lowest agent id on ties). Agents that fail or miss the deadline are
    /// excluded; with no responders the FCFS schedule is returned.
    /// Throws PoolClosed after shutdown().
    BrokerOutcome schedule_batch(const ScheduleRequest& request);

    /// Idempotent. Stops and joins all workers.
    void shutdown();

    void inject_fault(AgentId agent, Fault fault);

    bool closed() const;
    std::size_t size() const;
    const std::vector<AgentDescriptor>& descriptors() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Throws InvalidArgument on an empty list or duplicate agent ids.
AgentPool spawn_agents(std::vector<AgentDescriptor> descriptors, PoolOptions options = {});

// request_id,agent_id,status,fitness,makespan,imbalance,elapsed_ms
// followed by a row with status "winner" (agent_id "fcfs" on fallback).
// Timing columns are written as 0 unless include_timing is set.
void write_outcome_csv(std::ostream& out, const BrokerOutcome& outcome, bool include_timing, bool header = true);

} // namespace gridsched
