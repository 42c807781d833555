#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <sstream>

#include "gridsched/errors.hpp"
#include "gridsched/rng.hpp"
#include "gridsched/schedule.hpp"
#include "oracles.hpp"

using namespace gridsched;

namespace {

Workload make_workload(const std::vector<double>& costs, const std::vector<double>& speeds) {
    Workload w;
    for (std::size_t r = 0; r < speeds.size(); ++r) {
        w.resources.push_back({static_cast<ResourceId>(r), speeds[r], std::nullopt});
    }
    for (std::size_t t = 0; t < costs.size(); ++t) {
        w.tasks.push_back({static_cast<TaskId>(t), costs[t], 0.0, std::nullopt});
    }
    return w;
}

Schedule random_schedule(Rng& rng, std::size_t n, std::size_t m) {
    Schedule s;
    for (std::size_t t = 0; t < n; ++t) {
        s.assignment.push_back(static_cast<ResourceId>(rng.uniform_index(m)));
    }
    return s;
}

Workload random_workload(Rng& rng, std::size_t n, std::size_t m, bool homogeneous, bool with_arrivals) {
    Workload w;
    for (std::size_t r = 0; r < m; ++r) {
        w.resources.push_back({static_cast<ResourceId>(r), homogeneous ? 1.0 : rng.uniform(0.5, 3.0), std::nullopt});
    }
    for (std::size_t t = 0; t < n; ++t) {
        w.tasks.push_back({static_cast<TaskId>(t), rng.uniform(1.0, 20.0),
                           with_arrivals ? rng.uniform(0.0, 30.0) : 0.0, std::nullopt});
    }
    return w;
}

} // namespace

TEST_CASE("evaluate: hand-checked two-resource example") {
    const Workload w = make_workload({2, 2, 2}, {1, 2});
    const ScheduleMetrics m = evaluate({{0, 1, 1}}, w);
    CHECK(m.loads == std::vector<double>{2.0, 2.0});
    CHECK(m.makespan == 2.0);
    CHECK(m.imbalance == 0.0);
    CHECK(m.finish_times == std::vector<double>{2.0, 1.0, 2.0});
    CHECK(m.deadline_misses == 0);
    CHECK(m.fitness == 2.0);
}

TEST_CASE("evaluate: everything on one resource") {
    const Workload w = make_workload({3, 5, 7, 1}, {1, 1, 1});
    const ScheduleMetrics m = evaluate({{0, 0, 0, 0}}, w);
    CHECK(m.makespan == 16.0);
    CHECK(m.imbalance == doctest::Approx(16.0 - 16.0 / 3.0));
}

TEST_CASE("evaluate: empty task list") {
    const Workload w = make_workload({}, {1, 2});
    const ScheduleMetrics m = evaluate({}, w);
    CHECK(m.makespan == 0.0);
    CHECK(m.loads == std::vector<double>{0.0, 0.0});
    CHECK(m.imbalance == 0.0);
    CHECK(m.fitness == 0.0);
}

TEST_CASE("evaluate: invalid schedules") {
    const Workload w = make_workload({1, 1}, {1, 1});
    CHECK_THROWS_AS(evaluate({{0, 2}}, w), InvalidSchedule);
    CHECK_THROWS_AS(evaluate({{0}}, w), InvalidSchedule);
}

TEST_CASE("evaluate: arrivals gate starts and deadlines are scored") {
    Workload w = make_workload({4, 2}, {1});
    w.tasks[0].deadline = 3.0;
    w.tasks[1].arrival = 10.0;
    w.tasks[1].deadline = 13.0;
    const ScheduleMetrics m = evaluate({{0, 0}}, w, {1.0, 0.0, 10.0});
    CHECK(m.finish_times == std::vector<double>{4.0, 12.0});
    CHECK(m.loads == std::vector<double>{6.0});
    CHECK(m.makespan == 12.0);
    CHECK(m.deadline_misses == 1);
    CHECK(m.tardiness == 1.0);
    CHECK(m.fitness == 12.0 + 10.0 * 1.0);
}

TEST_CASE("fitness weights") {
    CHECK_THROWS_AS(FitnessWeights({0.0, 1.0, 1.0}).validate(), InvalidArgument);
    CHECK_THROWS_AS(FitnessWeights({1.0, -1.0, 1.0}).validate(), InvalidArgument);
    CHECK_NOTHROW(FitnessWeights{}.validate());

    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const Workload w = random_workload(rng, 1 + rng.uniform_index(30), 1 + rng.uniform_index(6), false, true);
        const Schedule s = random_schedule(rng, w.task_count(), w.resource_count());
        const ScheduleMetrics m = evaluate(s, w, {1.0, 0.0, 0.0});
        CHECK(m.fitness == m.makespan);
    }
}

TEST_CASE("load imbalance is zero exactly when loads are equal") {
    CHECK(load_imbalance({0.1, 0.1, 0.1}) == 0.0);
    CHECK(load_imbalance({}) == 0.0);
    CHECK(load_imbalance({1.0, 3.0}) == 1.0);
    CHECK(load_imbalance({1.0, 1.0, 1.0 + 1e-12}) > 0.0);
}

TEST_CASE("property: makespan equals max load with zero arrivals") {
    Rng rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        const Workload w = random_workload(rng, rng.uniform_index(40), 1 + rng.uniform_index(8), false, false);
        const ScheduleMetrics m = evaluate(random_schedule(rng, w.task_count(), w.resource_count()), w);
        CHECK(m.makespan == *std::max_element(m.loads.begin(), m.loads.end()));
        CHECK(m.imbalance >= 0.0);
    }
}

TEST_CASE("property: raising one task's cost never lowers the makespan") {
    Rng rng(12);
    for (int trial = 0; trial < 300; ++trial) {
        Workload w = random_workload(rng, 1 + rng.uniform_index(30), 1 + rng.uniform_index(6), false, true);
        const Schedule s = random_schedule(rng, w.task_count(), w.resource_count());
        const double before = evaluate(s, w).makespan;
        w.tasks[rng.uniform_index(w.task_count())].cost += rng.uniform(0.0, 10.0);
        CHECK(evaluate(s, w).makespan >= before);
    }
}

TEST_CASE("property: relabeling resources leaves makespan and imbalance unchanged") {
    Rng rng(13);
    for (int trial = 0; trial < 300; ++trial) {
        const Workload w = random_workload(rng, 1 + rng.uniform_index(30), 1 + rng.uniform_index(7), false, true);
        const Schedule s = random_schedule(rng, w.task_count(), w.resource_count());

        std::vector<ResourceId> perm(w.resource_count());
        std::iota(perm.begin(), perm.end(), ResourceId{0});
        for (std::size_t i = perm.size(); i > 1; --i) {
            std::swap(perm[i - 1], perm[rng.uniform_index(i)]);
        }
        Workload relabeled = w;
        for (std::size_t r = 0; r < w.resource_count(); ++r) {
            relabeled.resources[perm[r]].speed = w.resources[r].speed;
        }
        Schedule moved = s;
        for (auto& gene : moved.assignment) gene = perm[gene];

        const ScheduleMetrics a = evaluate(s, w);
        const ScheduleMetrics b = evaluate(moved, relabeled);
        CHECK(a.makespan == b.makespan);
        CHECK(a.imbalance == doctest::Approx(b.imbalance).epsilon(1e-12));
    }
}

TEST_CASE("fcfs: earliest-free resource rule") {
    const Workload w = make_workload({4, 3, 2, 1}, {1, 1});
    const Schedule s = fcfs_schedule(w);
    CHECK(s.assignment == std::vector<ResourceId>{0, 1, 1, 0});
    CHECK(evaluate(s, w).makespan == 5.0);
}

TEST_CASE("fcfs: single resource takes everything") {
    const Workload w = make_workload({3, 1, 4, 1, 5}, {2});
    CHECK(fcfs_schedule(w).assignment == std::vector<ResourceId>(5, 0));
}

TEST_CASE("fcfs: processes tasks in arrival order") {
    Workload w = make_workload({5, 5, 1}, {1, 1});
    w.tasks[0].arrival = 2.0;
    w.tasks[1].arrival = 0.0;
    w.tasks[2].arrival = 1.0;
    // order 1, 2, 0: task 1 -> r0 (free 5), task 2 -> r1 (free 2), task 0 -> r1 (2 < 5)
    CHECK(fcfs_schedule(w).assignment == std::vector<ResourceId>{1, 0, 1});
}

TEST_CASE("fcfs: 100 task x 11 resource workload uses every resource") {
    GenerateOptions o;
    o.seed = 42;
    const Workload w = generate_workload(o);
    const Schedule s = fcfs_schedule(w);
    REQUIRE(s.size() == 100);
    CHECK_NOTHROW(validate_schedule(s, w));
    std::vector<int> used(11, 0);
    for (auto r : s.assignment) used[r]++;
    for (int count : used) CHECK(count > 0);
}

TEST_CASE("fcfs: capacity limits") {
    Workload w = make_workload({1, 1, 1, 1}, {1, 1});
    w.resources[0].capacity = 1;
    // r0 takes task 0 and is then full for the zero-arrival batch.
    CHECK(fcfs_schedule(w).assignment == std::vector<ResourceId>{0, 1, 1, 1});

    w.resources[1].capacity = 2;
    CHECK_THROWS_AS(fcfs_schedule(w), CapacityExhausted);

    // A slot frees once the queued task has finished before the next arrival.
    w.tasks[2].arrival = 5.0;
    w.tasks[3].arrival = 5.0;
    CHECK(fcfs_schedule(w).assignment == std::vector<ResourceId>{0, 1, 0, 1});
}

TEST_CASE("property: fcfs stays within twice the optimum on homogeneous machines") {
    Rng rng(21);
    for (int trial = 0; trial < 150; ++trial) {
        const std::size_t n = 1 + rng.uniform_index(8);
        const std::size_t m = 1 + rng.uniform_index(3);
        const Workload w = random_workload(rng, n, m, true, false);
        const double optimum = oracle::brute_force_makespan(w);
        const double fcfs = evaluate(fcfs_schedule(w), w).makespan;
        CHECK(fcfs >= optimum);
        CHECK(fcfs <= 2.0 * optimum);
    }
}

TEST_CASE("exhaustive_optimum matches the recursive oracle") {
    Rng rng(22);
    for (int trial = 0; trial < 60; ++trial) {
        const Workload w = random_workload(rng, 1 + rng.uniform_index(7), 1 + rng.uniform_index(3), false, false);
        const Schedule best = exhaustive_optimum(w);
        CHECK(evaluate(best, w).makespan == doctest::Approx(oracle::brute_force_makespan(w)).epsilon(1e-12));
    }
    const Workload big = make_workload(std::vector<double>(13, 1.0), {1, 1, 1});
    CHECK_THROWS_AS(exhaustive_optimum(big), InvalidArgument);
    CHECK(assignment_space_size(6, 3) == 729);
    CHECK(assignment_space_size(100, 11) == std::numeric_limits<std::size_t>::max());
}

TEST_CASE("schedule dump format") {
    const Workload w = make_workload({2, 2, 2}, {1, 2});
    const Schedule s{{0, 1, 1}};
    std::ostringstream out;
    write_schedule(out, s, evaluate(s, w));
    CHECK(out.str() ==
          "task 0 -> resource 0\n"
          "task 1 -> resource 1\n"
          "task 2 -> resource 1\n"
          "# metrics\n"
          "makespan 2\n"
          "imbalance 0\n"
          "fitness 2\n");
}

TEST_CASE("dispatch order is ascending task id per resource") {
    const Schedule s{{1, 0, 1, 1, 0}};
    const auto q = s.dispatch_order(3);
    CHECK(q[0] == std::vector<TaskId>{1, 4});
    CHECK(q[1] == std::vector<TaskId>{0, 2, 3});
    CHECK(q[2].empty());
}
