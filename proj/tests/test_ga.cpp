#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <set>
#include <sstream>

#include "gridsched/errors.hpp"
#include "gridsched/ga.hpp"
#include "oracles.hpp"

using namespace gridsched;

namespace {

std::vector<std::size_t> gene_counts(const std::vector<Schedule>& population, std::size_t m) {
    std::vector<std::size_t> counts(m, 0);
    for (const Schedule& s : population) {
        for (auto gene : s.assignment) counts.at(gene)++;
    }
    return counts;
}

Workload homogeneous(const std::vector<double>& costs, std::size_t m) {
    Workload w;
    for (std::size_t r = 0; r < m; ++r) w.resources.push_back({static_cast<ResourceId>(r), 1.0, std::nullopt});
    for (std::size_t t = 0; t < costs.size(); ++t) {
        w.tasks.push_back({static_cast<TaskId>(t), costs[t], 0.0, std::nullopt});
    }
    return w;
}

} // namespace

TEST_CASE("distribution names") {
    CHECK(parse_distribution_kind("Poisson") == DistributionKind::Poisson);
    CHECK(parse_distribution_kind("LAPLACE") == DistributionKind::Laplace);
    CHECK_FALSE(parse_distribution_kind("cauchy").has_value());
    CHECK(to_string(DistributionKind::Geometric) == "geometric");
}

TEST_CASE("default distribution parameters") {
    CHECK(InitDistribution::defaults_for(DistributionKind::Poisson, 11) == InitDistribution{DistributionKind::Poisson, 5.5, 0.0});
    CHECK(InitDistribution::defaults_for(DistributionKind::Normal, 8) == InitDistribution{DistributionKind::Normal, 4.0, 2.0});
    CHECK(InitDistribution::defaults_for(DistributionKind::Geometric, 11).a == doctest::Approx(2.0 / 11.0));
    CHECK(InitDistribution::defaults_for(DistributionKind::Geometric, 2).a == 0.9);
    CHECK(InitDistribution::defaults_for(DistributionKind::Uniform, 11) == InitDistribution{DistributionKind::Uniform, 0.0, 11.0});
    CHECK(InitDistribution::defaults_for(DistributionKind::Laplace, 8) == InitDistribution{DistributionKind::Laplace, 4.0, 2.0});
}

TEST_CASE("invalid distribution parameters") {
    CHECK_THROWS_AS(init_population({DistributionKind::Poisson, 0.0, 0.0}, 2, 3, 3, 1), InvalidArgument);
    CHECK_THROWS_AS(init_population({DistributionKind::Normal, 1.0, 0.0}, 2, 3, 3, 1), InvalidArgument);
    CHECK_THROWS_AS(init_population({DistributionKind::Geometric, 1.0, 0.0}, 2, 3, 3, 1), InvalidArgument);
    CHECK_THROWS_AS(init_population({DistributionKind::Uniform, 2.0, 2.0}, 2, 3, 3, 1), InvalidArgument);
    CHECK_THROWS_AS(init_population({DistributionKind::Laplace, 1.0, -1.0}, 2, 3, 3, 1), InvalidArgument);
    CHECK_THROWS_AS(init_population(InitDistribution{}, 0, 3, 3, 1), InvalidArgument);
    CHECK_THROWS_AS(init_population(InitDistribution{}, 2, 3, 0, 1), InvalidArgument);
}

TEST_CASE("init_population: one resource means every gene is 0") {
    const auto pop = init_population(InitDistribution::defaults_for(DistributionKind::Uniform, 1), 20, 30, 1, 3);
    for (const Schedule& s : pop) CHECK(s.assignment == std::vector<ResourceId>(30, 0));
}

TEST_CASE("init_population: shape and determinism") {
    const auto dist = InitDistribution::defaults_for(DistributionKind::Normal, 7);
    const auto a = init_population(dist, 12, 40, 7, 99);
    const auto b = init_population(dist, 12, 40, 7, 99);
    REQUIRE(a.size() == 12);
    CHECK(a == b);
    for (const Schedule& s : a) {
        CHECK(s.size() == 40);
        for (auto g : s.assignment) CHECK(g < 7);
    }
    CHECK(init_population(dist, 12, 40, 7, 100) != a);
}

TEST_CASE("init_population: uniform frequencies within 3 sigma") {
    // 10,000 genes over 10 resources: count ~ Binomial(10000, 0.1), sigma = 30.
    const auto pop = init_population(InitDistribution::defaults_for(DistributionKind::Uniform, 10), 100, 100, 10, 2024);
    for (std::size_t count : gene_counts(pop, 10)) {
        CHECK(count >= 910);
        CHECK(count <= 1090);
    }
}

TEST_CASE("init_population: uniform passes chi-square at 100,000 genes") {
    const auto pop = init_population(InitDistribution::defaults_for(DistributionKind::Uniform, 11), 1000, 100, 11, 5);
    const double stat = oracle::chi_square_statistic(gene_counts(pop, 11), std::vector<double>(11, 1.0 / 11.0));
    const double p = boost::math::cdf(boost::math::complement(boost::math::chi_squared(10.0), stat));
    CHECK(p > 0.001);
}

TEST_CASE("init_population: every family matches its folded pmf") {
    const std::size_t m = 11;
    const auto check_family = [&](DistributionKind kind, const std::vector<double>& expected) {
        CAPTURE(to_string(kind));
        const auto pop = init_population(InitDistribution::defaults_for(kind, m), 1000, 100, m, 77);
        CHECK(oracle::total_variation(oracle::empirical_pmf(gene_counts(pop, m)), expected) < 0.02);
    };
    check_family(DistributionKind::Poisson, oracle::folded_poisson(5.5, m));
    check_family(DistributionKind::Normal, oracle::folded_normal(5.5, 2.75, m));
    check_family(DistributionKind::Geometric, oracle::folded_geometric(2.0 / 11.0, m));
    check_family(DistributionKind::Uniform, std::vector<double>(m, 1.0 / 11.0));
    check_family(DistributionKind::Laplace, oracle::folded_laplace(5.5, 2.75, m));
}

TEST_CASE("init_population: negative samples wrap with Euclidean modulo") {
    // Normal centred far below zero: floor(-0.5) = -1 -> resource m-1.
    const InitDistribution dist{DistributionKind::Normal, -0.5, 1e-9};
    for (const Schedule& s : init_population(dist, 3, 5, 4, 1)) {
        CHECK(s.assignment == std::vector<ResourceId>(5, 3));
    }
}

TEST_CASE("property: uniform init covers every resource") {
    for (std::size_t m : {2u, 5u, 11u, 23u}) {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            // pop * n = 100 * m genes
            const auto pop = init_population(InitDistribution::defaults_for(DistributionKind::Uniform, m), 10, 10 * m, m, seed);
            for (std::size_t count : gene_counts(pop, m)) CHECK(count > 0);
        }
    }
}

TEST_CASE("tournament_select") {
    const std::vector<double> fitness{5.0, 2.0, 9.0, 2.0, 7.0};
    Rng rng(1);
    CHECK(tournament_select(fitness, 5, rng) == 1);
    const std::vector<double> single{3.0};
    CHECK(tournament_select(single, 2, rng) == 0);

    Rng a(42), b(42);
    for (int i = 0; i < 50; ++i) CHECK(tournament_select(fitness, 3, a) == tournament_select(fitness, 3, b));

    const std::vector<double> empty;
    CHECK_THROWS_AS(tournament_select(empty, 2, rng), InvalidArgument);
    CHECK_THROWS_AS(tournament_select(fitness, 1, rng), InvalidArgument);

    // The worst member only wins when it fills the whole tournament: (1/5)^3.
    std::size_t worst_wins = 0;
    for (int i = 0; i < 2000; ++i) worst_wins += tournament_select(fitness, 3, rng) == 2;
    CHECK(worst_wins < 2000 / 50);
}

TEST_CASE("tournament over schedules returns a population member") {
    const std::vector<Schedule> pop{{{0, 1}}, {{1, 1}}, {{1, 0}}};
    const std::vector<double> fitness{3.0, 1.0, 2.0};
    Rng rng(8);
    CHECK(&tournament_select(std::span<const Schedule>(pop), fitness, 3, rng) == &pop[1]);
}

TEST_CASE("crossover") {
    Rng rng(3);
    const Schedule a{{0, 0, 1, 1}};
    const Schedule b{{1, 1, 0, 0}};

    auto [c1, c2] = crossover(a, b, 0.0, rng);
    CHECK(c1 == a);
    CHECK(c2 == b);

    auto [d1, d2] = crossover(a, a, 1.0, rng);
    CHECK(d1 == a);
    CHECK(d2 == a);

    auto [e1, e2] = crossover_at(a, b, 2);
    CHECK(e1.assignment == std::vector<ResourceId>{0, 0, 0, 0});
    CHECK(e2.assignment == std::vector<ResourceId>{1, 1, 1, 1});

    CHECK_THROWS_AS(crossover(a, Schedule{{0, 1}}, 0.5, rng), InvalidArgument);
}

TEST_CASE("property: crossover children mix parents gene by gene") {
    Rng rng(4);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + rng.uniform_index(30);
        Schedule a, b;
        for (std::size_t i = 0; i < n; ++i) {
            a.assignment.push_back(static_cast<ResourceId>(rng.uniform_index(5)));
            b.assignment.push_back(static_cast<ResourceId>(rng.uniform_index(5)));
        }
        auto [c1, c2] = crossover(a, b, 0.9, rng);
        REQUIRE(c1.size() == n);
        REQUIRE(c2.size() == n);
        // single point: c1 = a-prefix + b-suffix, c2 the mirror
        std::size_t cut = 0;
        while (cut < n && c1.assignment[cut] == a.assignment[cut] && c2.assignment[cut] == b.assignment[cut]) ++cut;
        for (std::size_t i = cut; i < n; ++i) {
            CHECK(c1.assignment[i] == b.assignment[i]);
            CHECK(c2.assignment[i] == a.assignment[i]);
        }
    }
}

TEST_CASE("mutate") {
    Rng rng(6);
    const Schedule s{{0, 1, 2, 3}};
    CHECK(mutate(s, 0.0, 4, rng) == s);
    const Schedule single{{0, 0, 0}};
    CHECK(mutate(single, 1.0, 1, rng) == single);

    // rate 1 redraws every gene uniformly: P(unchanged) = 1/m. With 10,000
    // genes and m = 10 the unchanged count is Binomial(10000, 0.1), sd 30.
    Schedule big;
    for (int i = 0; i < 10000; ++i) big.assignment.push_back(static_cast<ResourceId>(i % 10));
    const Schedule mutated = mutate(big, 1.0, 10, rng);
    std::size_t same = 0;
    for (std::size_t i = 0; i < big.size(); ++i) {
        CHECK(mutated.assignment[i] < 10);
        same += mutated.assignment[i] == big.assignment[i];
    }
    CHECK(same >= 880);
    CHECK(same <= 1120);
}

TEST_CASE("GaConfig validation") {
    GaConfig c;
    CHECK_NOTHROW(c.validate());
    c.elite_count = c.population_size;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = GaConfig{};
    c.tournament_size = 1;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = GaConfig{};
    c.crossover_rate = 1.5;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = GaConfig{};
    c.mutation_rate = -0.1;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    c = GaConfig{};
    c.generations = 0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
}

TEST_CASE("evolve: single task, single resource") {
    Workload w = homogeneous({7.0}, 1);
    w.resources[0].speed = 2.0;
    GaConfig c;
    c.init = InitDistribution::defaults_for(DistributionKind::Poisson, 1);
    c.generations = 5;
    const GaResult r = evolve(w, c);
    CHECK(r.best_metrics.fitness == 3.5);
    CHECK(r.best.assignment == std::vector<ResourceId>{0});
}

TEST_CASE("evolve: finds the exhaustive optimum on 6 tasks x 3 resources") {
    GenerateOptions o;
    o.n_tasks = 6;
    o.n_resources = 3;
    o.heterogeneity = 0.0;
    o.seed = 314;
    const Workload w = generate_workload(o);
    const double optimum = oracle::brute_force_makespan(w);

    int hits = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        GaConfig c;
        c.population_size = 64;
        c.generations = 300;
        c.init = InitDistribution::defaults_for(DistributionKind::Uniform, 3);
        c.seed = seed;
        const GaResult r = evolve(w, c);
        hits += r.best_metrics.makespan <= optimum * (1.0 + 1e-12);
    }
    CHECK(hits >= 19);
}

TEST_CASE("evolve: 200 generations on 100 tasks x 11 resources") {
    GenerateOptions o;
    o.seed = 42;
    const Workload w = generate_workload(o);
    GaConfig c;
    c.generations = 200;
    c.init = InitDistribution::defaults_for(DistributionKind::Laplace, 11);
    c.seed = 9;
    const GaResult r = evolve(w, c);
    CHECK(r.generations_run == 200);
    REQUIRE(r.history.size() == 200);
    for (std::size_t g = 1; g < r.history.size(); ++g) CHECK(r.history[g] <= r.history[g - 1]);
    CHECK(r.history.back() == r.best_metrics.fitness);
    CHECK(evaluate(r.best, w).fitness == r.best_metrics.fitness);
}

TEST_CASE("property: every individual of every generation is a valid schedule") {
    Rng rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        GenerateOptions o;
        o.n_tasks = 1 + rng.uniform_index(40);
        o.n_resources = 1 + rng.uniform_index(9);
        o.seed = rng.next_u64();
        const Workload w = generate_workload(o);
        GaConfig c;
        c.population_size = 20;
        c.generations = 30;
        c.mutation_rate = 0.2;
        c.init = InitDistribution::defaults_for(static_cast<DistributionKind>(trial % 5), o.n_resources);
        c.seed = rng.next_u64();
        std::size_t seen = 0;
        evolve(w, c, [&](std::size_t, std::span<const Schedule> population) {
            ++seen;
            CHECK(population.size() == 20);
            for (const Schedule& s : population) CHECK_NOTHROW(validate_schedule(s, w));
        });
        CHECK(seen == 30);
    }
}

TEST_CASE("evolve is a pure function of workload and config") {
    GenerateOptions o;
    o.n_tasks = 30;
    o.n_resources = 4;
    o.seed = 1;
    const Workload w = generate_workload(o);
    GaConfig c;
    c.generations = 40;
    c.init = InitDistribution::defaults_for(DistributionKind::Geometric, 4);
    c.seed = 17;
    const GaResult a = evolve(w, c);
    const GaResult b = evolve(w, c);
    CHECK(a.best == b.best);
    CHECK(a.history == b.history);
    c.seed = 18;
    CHECK(evolve(w, c).history != a.history);
}

TEST_CASE("history CSV") {
    const Workload w = homogeneous({1.0, 1.0}, 2);
    GaConfig c;
    c.population_size = 4;
    c.generations = 3;
    c.init = InitDistribution::defaults_for(DistributionKind::Uniform, 2);
    const GaResult r = evolve(w, c);
    std::ostringstream out;
    write_history_csv(out, r);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "generation,best_fitness,best_makespan,best_imbalance");
    int rows = 0;
    while (std::getline(in, line)) {
        CHECK(line.rfind(std::to_string(rows) + ",", 0) == 0);
        ++rows;
    }
    CHECK(rows == 3);
}
