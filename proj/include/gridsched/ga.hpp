#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gridsched/rng.hpp"
#include "gridsched/schedule.hpp"
#include "gridsched/workload.hpp"

namespace gridsched {

enum class DistributionKind { Poisson, Normal, Geometric, Uniform, Laplace };

std::string_view to_string(DistributionKind kind);
/// Accepts the names printed by to_string, case-insensitively.
std::optional<DistributionKind> parse_distribution_kind(std::string_view name);

/// Distribution used to draw initial genes. Samples are mapped to a resource
/// id with floor() followed by Euclidean modulo, so negative samples wrap.
///
/// Parameter meaning per kind:
///   Poisson   a = rate
///   Normal    a = mean,     b = sigma
///   Geometric a = success probability p in (0, 1)
///   Uniform   a = lo,       b = hi (continuous on [lo, hi))
///   Laplace   a = location, b = scale
struct InitDistribution {
    DistributionKind kind = DistributionKind::Uniform;
    double a = 0.0;
    double b = 1.0;

    /// Defaults centred on m/2 for m resources.
    static InitDistribution defaults_for(DistributionKind kind, std::size_t n_resources);

    void validate() const;
    double sample(Rng& rng) const;
    ResourceId sample_gene(Rng& rng, std::size_t n_resources) const;

    bool operator==(const InitDistribution&) const = default;
};

struct GaConfig {
    std::size_t population_size = 50;
    std::size_t generations = 200;
    double crossover_rate = 0.9;
    std::optional<double> mutation_rate; // unset: 1 / n_tasks
    std::size_t tournament_size = 3;
    std::size_t elite_count = 2;
    InitDistribution init;
    FitnessWeights weights;
    std::uint64_t seed = 0;

    void validate() const;
};

struct GaResult {
    Schedule best;
    ScheduleMetrics best_metrics;
    std::vector<double> history; // best fitness after each generation
    std::vector<ScheduleMetrics> history_metrics;
    std::size_t generations_run = 0;
};

std::vector<Schedule> init_population(const InitDistribution& dist, std::size_t pop_size, std::size_t n_tasks,
                                      std::size_t n_resources, std::uint64_t seed);

/// Lowest fitness among k members drawn uniformly with replacement; ties go
/// to the earliest index. With k >= population size every member competes.
std::size_t tournament_select(std::span<const double> fitness, std::size_t k, Rng& rng);

const Schedule& tournament_select(std::span<const Schedule> population, std::span<const double> fitness,
                                  std::size_t k, Rng& rng);

/// Single-point crossover at cut in [1, n-1]: children are a[0,cut)+b[cut,n)
/// and b[0,cut)+a[cut,n).
std::pair<Schedule, Schedule> crossover_at(const Schedule& a, const Schedule& b, std::size_t cut);

/// With probability rate applies crossover_at with a uniform cut, otherwise
/// returns copies of the parents.
std::pair<Schedule, Schedule> crossover(const Schedule& a, const Schedule& b, double rate, Rng& rng);

/// Each gene is redrawn uniformly over [0, n_resources) with probability
/// rate (it may redraw its old value).
Schedule mutate(Schedule s, double rate, std::size_t n_resources, Rng& rng);

/// Called once per generation with the population just evaluated.
using GenerationObserver = std::function<void(std::size_t generation, std::span<const Schedule> population)>;

/// Runs exactly config.generations generations. Each generation is
/// evaluated, the elite_count best are copied unchanged, and the rest is
/// filled by tournament selection, crossover and mutation. Pure function of
/// (workload, config).
GaResult evolve(const Workload& workload, const GaConfig& config, const GenerationObserver& observer = {});

// generation,best_fitness,best_makespan,best_imbalance
void write_history_csv(std::ostream& out, const GaResult& result);

} // namespace gridsched
