#include "gridsched/coordination.hpp"

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <future>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include "gridsched/errors.hpp"

namespace gridsched {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::vector<AgentDescriptor> preset(std::initializer_list<DistributionKind> kinds, std::uint64_t base_seed) {
    std::vector<AgentDescriptor> agents;
    AgentId id = 0;
    for (DistributionKind kind : kinds) {
        agents.push_back({id, kind, std::nullopt, derive_seed(base_seed, 100 + id)});
        ++id;
    }
    return agents;
}

AgentReport run_agent(const AgentDescriptor& agent, const ScheduleRequest& request) {
    const auto start = Clock::now();
    AgentReport report;
    report.agent_id = agent.agent_id;
    try {
        report.result = evolve(request.workload, agent_config(agent, request));
        report.status = AgentStatus::Ok;
    } catch (const std::exception& e) {
        report.status = AgentStatus::Failed;
        report.error = e.what();
    }
    report.elapsed_ms = ms_since(start);
    return report;
}

struct Job {
    std::shared_ptr<const ScheduleRequest> request;
    std::promise<AgentReport> reply;
};

// One agent. Owns its thread and mailbox; all shared state sits behind mu.
class Worker {
public:
    explicit Worker(AgentDescriptor descriptor) : descriptor_(std::move(descriptor)) {}

    void start() { thread_ = std::thread([this] { loop(); }); }

    std::future<AgentReport> submit(std::shared_ptr<const ScheduleRequest> request) {
        Job job{std::move(request), {}};
        auto future = job.reply.get_future();
        std::lock_guard lock(mu_);
        if (dead_ || stopping_) {
            return future; // job (and its promise) dropped: reads as broken_promise
        }
        mailbox_.push_back(std::move(job));
        cv_.notify_all();
        return future;
    }

    void set_fault(Fault fault) {
        std::lock_guard lock(mu_);
        fault_ = fault;
        cv_.notify_all();
    }

    void stop() {
        {
            std::lock_guard lock(mu_);
            stopping_ = true;
            cv_.notify_all();
        }
        if (thread_.joinable()) {
            thread_.join();
        }
    }

    const AgentDescriptor& descriptor() const { return descriptor_; }

private:
    void loop() {
        for (;;) {
            Job job;
            {
                std::unique_lock lock(mu_);
                cv_.wait(lock, [&] { return stopping_ || fault_ == Fault::Crash || !mailbox_.empty(); });
                if (stopping_ || fault_ == Fault::Crash) {
                    dead_ = fault_ == Fault::Crash;
                    mailbox_.clear();
                    return;
                }
                job = std::move(mailbox_.front());
                mailbox_.pop_front();
                if (fault_ == Fault::Hang) {
                    cv_.wait(lock, [&] { return stopping_ || fault_ != Fault::Hang; });
                    if (stopping_ || fault_ == Fault::Crash) {
                        dead_ = fault_ == Fault::Crash;
                        mailbox_.clear();
                        return;
                    }
                }
            }
            job.reply.set_value(run_agent(descriptor_, *job.request));
        }
    }

    AgentDescriptor descriptor_;
    std::thread thread_;
    std::mutex mu_;
    std::condition_variable cv_;
    std::deque<Job> mailbox_;
    Fault fault_ = Fault::None;
    bool stopping_ = false;
    bool dead_ = false;
};

} // namespace

std::vector<AgentDescriptor> three_agent_preset(std::uint64_t base_seed) {
    return preset({DistributionKind::Poisson, DistributionKind::Normal, DistributionKind::Uniform}, base_seed);
}

std::vector<AgentDescriptor> five_agent_preset(std::uint64_t base_seed) {
    return preset({DistributionKind::Poisson, DistributionKind::Normal, DistributionKind::Geometric,
                   DistributionKind::Uniform, DistributionKind::Laplace},
                  base_seed);
}

GaConfig GaOverrides::apply(GaConfig base) const {
    if (population_size) base.population_size = *population_size;
    if (generations) base.generations = *generations;
    if (crossover_rate) base.crossover_rate = *crossover_rate;
    if (mutation_rate) base.mutation_rate = *mutation_rate;
    if (tournament_size) base.tournament_size = *tournament_size;
    if (elite_count) base.elite_count = *elite_count;
    if (weights) base.weights = *weights;
    return base;
}

GaConfig agent_config(const AgentDescriptor& agent, const ScheduleRequest& request) {
    GaConfig config = request.ga_overrides.apply(GaConfig{});
    config.init = agent.init ? *agent.init
                             : InitDistribution::defaults_for(agent.kind, request.workload.resource_count());
    config.seed = agent.seed;
    return config;
}

std::string_view to_string(AgentStatus status) {
    switch (status) {
    case AgentStatus::Ok: return "ok";
    case AgentStatus::Failed: return "failed";
    case AgentStatus::Timeout: return "timeout";
    }
    return "unknown";
}

struct AgentPool::Impl {
    std::vector<AgentDescriptor> descriptors;
    PoolOptions options;
    std::vector<std::unique_ptr<Worker>> workers;  // concurrent mode
    std::vector<Fault> faults;                      // sequential mode
    mutable std::mutex mu;
    bool closed = false;

    std::size_t index_of(AgentId id) const {
        for (std::size_t i = 0; i < descriptors.size(); ++i) {
            if (descriptors[i].agent_id == id) {
                return i;
            }
        }
        throw InvalidArgument("no agent with id " + std::to_string(id));
    }

    std::vector<AgentReport> run_sequential(const ScheduleRequest& request) const {
        std::vector<AgentReport> reports;
        for (std::size_t i = 0; i < descriptors.size(); ++i) {
            switch (faults[i]) {
            case Fault::None:
                reports.push_back(run_agent(descriptors[i], request));
                break;
            case Fault::Crash:
                reports.push_back({descriptors[i].agent_id, AgentStatus::Failed, std::nullopt, 0.0, "agent crashed"});
                break;
            case Fault::Hang:
                reports.push_back({descriptors[i].agent_id, AgentStatus::Timeout, std::nullopt, 0.0,
                                   "agent did not answer"});
                break;
            }
        }
        return reports;
    }

    std::vector<AgentReport> run_concurrent(const ScheduleRequest& request) const {
        auto shared = std::make_shared<const ScheduleRequest>(request);
        const auto sent = Clock::now();
        std::vector<std::future<AgentReport>> pending;
        pending.reserve(workers.size());
        for (const auto& w : workers) {
            pending.push_back(w->submit(shared));
        }

        const auto budget = std::chrono::duration_cast<Clock::duration>(
            std::chrono::duration<double>(request.agent_deadline));
        std::vector<AgentReport> reports;
        for (std::size_t i = 0; i < pending.size(); ++i) {
            const AgentId id = descriptors[i].agent_id;
            if (pending[i].wait_until(sent + budget) != std::future_status::ready) {
                reports.push_back({id, AgentStatus::Timeout, std::nullopt, ms_since(sent), "deadline elapsed"});
                continue;
            }
            try {
                reports.push_back(pending[i].get());
            } catch (const std::future_error&) {
                reports.push_back({id, AgentStatus::Failed, std::nullopt, ms_since(sent), "agent unavailable"});
            }
        }
        return reports;
    }
};

AgentPool::AgentPool(std::vector<AgentDescriptor> descriptors, PoolOptions options) : impl_(std::make_unique<Impl>()) {
    if (descriptors.empty()) {
        throw InvalidArgument("agent pool needs at least one agent");
    }
    std::set<AgentId> ids;
    for (const AgentDescriptor& d : descriptors) {
        if (!ids.insert(d.agent_id).second) {
            throw InvalidArgument("duplicate agent id " + std::to_string(d.agent_id));
        }
        if (d.init) {
            d.init->validate();
        }
    }
    std::sort(descriptors.begin(), descriptors.end(),
              [](const AgentDescriptor& a, const AgentDescriptor& b) { return a.agent_id < b.agent_id; });

    impl_->descriptors = std::move(descriptors);
    impl_->options = options;
    impl_->faults.assign(impl_->descriptors.size(), Fault::None);
    if (options.concurrent) {
        for (const AgentDescriptor& d : impl_->descriptors) {
            impl_->workers.push_back(std::make_unique<Worker>(d));
        }
        for (auto& w : impl_->workers) {
            w->start();
        }
    }
}

AgentPool::AgentPool(AgentPool&&) noexcept = default;
AgentPool& AgentPool::operator=(AgentPool&& other) noexcept {
    if (this != &other) {
        shutdown();
        impl_ = std::move(other.impl_);
    }
    return *this;
}

AgentPool::~AgentPool() { shutdown(); }

BrokerOutcome AgentPool::schedule_batch(const ScheduleRequest& request) {
    if (!impl_ || closed()) {
        throw PoolClosed();
    }
    if (!(request.agent_deadline > 0.0)) {
        throw InvalidArgument("agent_deadline must be positive");
    }
    request.workload.validate();
    const auto start = Clock::now();

    BrokerOutcome outcome;
    outcome.request_id = request.request_id;
    outcome.per_agent = impl_->options.concurrent ? impl_->run_concurrent(request) : impl_->run_sequential(request);

    const AgentReport* best = nullptr;
    for (const AgentReport& r : outcome.per_agent) {
        if (r.status != AgentStatus::Ok) {
            continue;
        }
        // per_agent is in ascending id order, so strict < keeps the lowest id on ties.
        if (!best || r.result->best_metrics.fitness < best->result->best_metrics.fitness) {
            best = &r;
        }
    }

    if (best) {
        outcome.winner = best->result->best;
        outcome.winner_metrics = best->result->best_metrics;
        outcome.winner_agent = best->agent_id;
    } else {
        const FitnessWeights weights = request.ga_overrides.weights.value_or(FitnessWeights{});
        outcome.winner = fcfs_schedule(request.workload);
        outcome.winner_metrics = evaluate(outcome.winner, request.workload, weights);
        outcome.fallback_used = true;
    }
    outcome.elapsed_ms = ms_since(start);
    return outcome;
}

void AgentPool::shutdown() {
    if (!impl_) {
        return;
    }
    {
        std::lock_guard lock(impl_->mu);
        if (impl_->closed) {
            return;
        }
        impl_->closed = true;
    }
    for (auto& w : impl_->workers) {
        w->stop();
    }
}

void AgentPool::inject_fault(AgentId agent, Fault fault) {
    const std::size_t i = impl_->index_of(agent);
    impl_->faults[i] = fault;
    if (impl_->options.concurrent) {
        impl_->workers[i]->set_fault(fault);
    }
}

bool AgentPool::closed() const {
    if (!impl_) {
        return true;
    }
    std::lock_guard lock(impl_->mu);
    return impl_->closed;
}

std::size_t AgentPool::size() const { return impl_ ? impl_->descriptors.size() : 0; }

const std::vector<AgentDescriptor>& AgentPool::descriptors() const { return impl_->descriptors; }

AgentPool spawn_agents(std::vector<AgentDescriptor> descriptors, PoolOptions options) {
    return AgentPool(std::move(descriptors), options);
}

void write_outcome_csv(std::ostream& out, const BrokerOutcome& outcome, bool include_timing, bool header) {
    if (header) {
        out << "request_id,agent_id,status,fitness,makespan,imbalance,elapsed_ms\n";
    }
    const auto timing = [&](double ms) { return include_timing ? format_real(ms) : std::string("0"); };
    for (const AgentReport& r : outcome.per_agent) {
        out << outcome.request_id << ',' << r.agent_id << ',' << to_string(r.status) << ',';
        if (r.status == AgentStatus::Ok) {
            const ScheduleMetrics& m = r.result->best_metrics;
            out << format_real(m.fitness) << ',' << format_real(m.makespan) << ',' << format_real(m.imbalance);
        } else {
            out << ",,";
        }
        out << ',' << timing(r.elapsed_ms) << '\n';
    }
    const ScheduleMetrics& w = outcome.winner_metrics;
    out << outcome.request_id << ','
        << (outcome.winner_agent ? std::to_string(*outcome.winner_agent) : std::string("fcfs")) << ",winner,"
        << format_real(w.fitness) << ',' << format_real(w.makespan) << ',' << format_real(w.imbalance) << ','
        << timing(outcome.elapsed_ms) << '\n';
}

} // namespace gridsched
