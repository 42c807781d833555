#include "gridsched/ga.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <ostream>

#include "gridsched/errors.hpp"

namespace gridsched {

std::string_view to_string(DistributionKind kind) {
    switch (kind) {
    case DistributionKind::Poisson: return "poisson";
    case DistributionKind::Normal: return "normal";
    case DistributionKind::Geometric: return "geometric";
    case DistributionKind::Uniform: return "uniform";
    case DistributionKind::Laplace: return "laplace";
    }
    return "unknown";
}

std::optional<DistributionKind> parse_distribution_kind(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (auto kind : {DistributionKind::Poisson, DistributionKind::Normal, DistributionKind::Geometric,
                      DistributionKind::Uniform, DistributionKind::Laplace}) {
        if (lower == to_string(kind)) {
            return kind;
        }
    }
    return std::nullopt;
}

InitDistribution InitDistribution::defaults_for(DistributionKind kind, std::size_t n_resources) {
    const double m = static_cast<double>(n_resources);
    switch (kind) {
    case DistributionKind::Poisson: return {kind, m / 2.0, 0.0};
    case DistributionKind::Normal: return {kind, m / 2.0, m / 4.0};
    case DistributionKind::Geometric: return {kind, std::min(0.9, 2.0 / m), 0.0};
    case DistributionKind::Uniform: return {kind, 0.0, m};
    case DistributionKind::Laplace: return {kind, m / 2.0, m / 4.0};
    }
    throw InvalidArgument("unknown distribution kind");
}

void InitDistribution::validate() const {
    const auto bad = [&](const char* what) {
        throw InvalidArgument(std::string(to_string(kind)) + " distribution: " + what);
    };
    if (!std::isfinite(a) || !std::isfinite(b)) {
        bad("parameters must be finite");
    }
    switch (kind) {
    case DistributionKind::Poisson:
        if (!(a > 0.0)) bad("rate must be > 0");
        break;
    case DistributionKind::Normal:
        if (!(b > 0.0)) bad("sigma must be > 0");
        break;
    case DistributionKind::Geometric:
        if (!(a > 0.0 && a < 1.0)) bad("p must be in (0, 1)");
        break;
    case DistributionKind::Uniform:
        if (!(a < b)) bad("lo must be < hi");
        break;
    case DistributionKind::Laplace:
        if (!(b > 0.0)) bad("scale must be > 0");
        break;
    }
}

double InitDistribution::sample(Rng& rng) const {
    switch (kind) {
    case DistributionKind::Poisson: return static_cast<double>(rng.poisson(a));
    case DistributionKind::Normal: return rng.normal(a, b);
    case DistributionKind::Geometric: return static_cast<double>(rng.geometric(a));
    case DistributionKind::Uniform: return rng.uniform(a, b);
    case DistributionKind::Laplace: return rng.laplace(a, b);
    }
    return 0.0;
}

ResourceId InitDistribution::sample_gene(Rng& rng, std::size_t n_resources) const {
    const double m = static_cast<double>(n_resources);
    double folded = std::fmod(std::floor(sample(rng)), m);
    if (folded < 0.0) {
        folded += m;
    }
    return static_cast<ResourceId>(folded);
}

void GaConfig::validate() const {
    if (population_size < 1) {
        throw InvalidArgument("population_size must be >= 1");
    }
    if (generations < 1) {
        throw InvalidArgument("generations must be >= 1");
    }
    if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) {
        throw InvalidArgument("crossover_rate must be in [0, 1]");
    }
    if (mutation_rate && !(*mutation_rate >= 0.0 && *mutation_rate <= 1.0)) {
        throw InvalidArgument("mutation_rate must be in [0, 1]");
    }
    if (tournament_size < 2) {
        throw InvalidArgument("tournament_size must be >= 2");
    }
    if (elite_count < 1 || elite_count >= population_size) {
        throw InvalidArgument("elite_count must satisfy 1 <= elite_count < population_size");
    }
    init.validate();
    weights.validate();
}

std::vector<Schedule> init_population(const InitDistribution& dist, std::size_t pop_size, std::size_t n_tasks,
                                      std::size_t n_resources, std::uint64_t seed) {
    if (pop_size < 1) {
        throw InvalidArgument("init_population: pop_size must be >= 1");
    }
    if (n_resources < 1) {
        throw InvalidArgument("init_population: n_resources must be >= 1");
    }
    dist.validate();

    Rng rng(seed);
    std::vector<Schedule> population(pop_size);
    for (Schedule& s : population) {
        s.assignment.resize(n_tasks);
        for (ResourceId& gene : s.assignment) {
            gene = dist.sample_gene(rng, n_resources);
        }
    }
    return population;
}

std::size_t tournament_select(std::span<const double> fitness, std::size_t k, Rng& rng) {
    if (fitness.empty()) {
        throw InvalidArgument("tournament_select: empty population");
    }
    if (k < 2) {
        throw InvalidArgument("tournament_select: k must be >= 2");
    }
    const std::size_t n = fitness.size();
    if (k >= n) {
        return static_cast<std::size_t>(std::min_element(fitness.begin(), fitness.end()) - fitness.begin());
    }
    std::size_t winner = rng.uniform_index(n);
    for (std::size_t i = 1; i < k; ++i) {
        const std::size_t challenger = rng.uniform_index(n);
        if (fitness[challenger] < fitness[winner] ||
            (fitness[challenger] == fitness[winner] && challenger < winner)) {
            winner = challenger;
        }
    }
    return winner;
}

const Schedule& tournament_select(std::span<const Schedule> population, std::span<const double> fitness,
                                  std::size_t k, Rng& rng) {
    if (population.size() != fitness.size()) {
        throw InvalidArgument("tournament_select: population and fitness sizes differ");
    }
    return population[tournament_select(fitness, k, rng)];
}

std::pair<Schedule, Schedule> crossover_at(const Schedule& a, const Schedule& b, std::size_t cut) {
    if (a.size() != b.size()) {
        throw InvalidArgument("crossover: parents have different lengths");
    }
    if (cut > a.size()) {
        throw InvalidArgument("crossover: cut beyond chromosome length");
    }
    Schedule c1 = a;
    Schedule c2 = b;
    std::copy(b.assignment.begin() + static_cast<std::ptrdiff_t>(cut), b.assignment.end(),
              c1.assignment.begin() + static_cast<std::ptrdiff_t>(cut));
    std::copy(a.assignment.begin() + static_cast<std::ptrdiff_t>(cut), a.assignment.end(),
              c2.assignment.begin() + static_cast<std::ptrdiff_t>(cut));
    return {std::move(c1), std::move(c2)};
}

std::pair<Schedule, Schedule> crossover(const Schedule& a, const Schedule& b, double rate, Rng& rng) {
    if (a.size() != b.size()) {
        throw InvalidArgument("crossover: parents have different lengths");
    }
    if (a.size() < 2 || !(rng.uniform01() < rate)) {
        return {a, b};
    }
    const std::size_t cut = 1 + rng.uniform_index(a.size() - 1);
    return crossover_at(a, b, cut);
}

Schedule mutate(Schedule s, double rate, std::size_t n_resources, Rng& rng) {
    if (rate <= 0.0 || n_resources == 0) {
        return s;
    }
    for (ResourceId& gene : s.assignment) {
        if (rng.uniform01() < rate) {
            gene = static_cast<ResourceId>(rng.uniform_index(n_resources));
        }
    }
    return s;
}

GaResult evolve(const Workload& workload, const GaConfig& config, const GenerationObserver& observer) {
    config.validate();
    workload.validate();

    const std::size_t n = workload.task_count();
    const std::size_t m = workload.resource_count();
    const std::size_t pop_size = config.population_size;
    const double mutation_rate = config.mutation_rate.value_or(n > 0 ? 1.0 / static_cast<double>(n) : 0.0);

    std::vector<Schedule> population = init_population(config.init, pop_size, n, m, derive_seed(config.seed, 0));
    Rng rng(derive_seed(config.seed, 1));

    GaResult result;
    result.history.reserve(config.generations);
    std::vector<double> fitness(pop_size);
    std::vector<ScheduleMetrics> metrics(pop_size);
    std::vector<std::size_t> ranking(pop_size);
    std::vector<Schedule> next;
    next.reserve(pop_size);

    for (std::size_t gen = 0; gen < config.generations; ++gen) {
        for (std::size_t i = 0; i < pop_size; ++i) {
            metrics[i] = evaluate(population[i], workload, config.weights);
            fitness[i] = metrics[i].fitness;
        }
        if (observer) {
            observer(gen, population);
        }

        std::iota(ranking.begin(), ranking.end(), std::size_t{0});
        std::stable_sort(ranking.begin(), ranking.end(),
                         [&](std::size_t x, std::size_t y) { return fitness[x] < fitness[y]; });

        const std::size_t leader = ranking.front();
        if (gen == 0 || fitness[leader] < result.best_metrics.fitness) {
            result.best = population[leader];
            result.best_metrics = metrics[leader];
        }
        result.history.push_back(result.best_metrics.fitness);
        result.history_metrics.push_back(result.best_metrics);
        result.generations_run = gen + 1;

        if (gen + 1 == config.generations) {
            break;
        }

        next.clear();
        for (std::size_t e = 0; e < config.elite_count; ++e) {
            next.push_back(population[ranking[e]]);
        }
        while (next.size() < pop_size) {
            const Schedule& mother = tournament_select(population, fitness, config.tournament_size, rng);
            const Schedule& father = tournament_select(population, fitness, config.tournament_size, rng);
            auto [first, second] = crossover(mother, father, config.crossover_rate, rng);
            next.push_back(mutate(std::move(first), mutation_rate, m, rng));
            if (next.size() < pop_size) {
                next.push_back(mutate(std::move(second), mutation_rate, m, rng));
            }
        }
        population.swap(next);
    }
    return result;
}

void write_history_csv(std::ostream& out, const GaResult& result) {
    out << "generation,best_fitness,best_makespan,best_imbalance\n";
    for (std::size_t g = 0; g < result.history.size(); ++g) {
        const ScheduleMetrics& best = result.history_metrics[g];
        out << g << ',' << format_real(result.history[g]) << ',' << format_real(best.makespan) << ','
            << format_real(best.imbalance) << '\n';
    }
}

} // namespace gridsched
