#include <catch2/catch_amalgamated.hpp>

#include "test_helpers.hpp"
#include "vmc/catalog.hpp"
#include "vmc/smc.hpp"

using namespace vmc;

TEST_CASE("zero kernel holds at the origin forever", "[smc]") {
    SmcKernel kernel(zero_marginals(6));
    RandomStream rng = RandomStream::derive(1, 0);
    StaircasePrefix s = sample_staircase(kernel, 6, rng);
    CHECK(s.states == std::vector<int>{0, 0, 0, 0, 0, 0, 0});
    CHECK(kernel.hold_probability(3, 0) == 1);
}

TEST_CASE("deterministic kernel from a delta point", "[smc]") {
    // All hold/jump odds are 0 or 1, so every replicate walks 0,1,2,3,3,...
    Balayage down = down_balayage(8);
    SmcKernel kernel(delta_point(down, 3, 6));
    for (std::uint64_t r = 0; r < 16; ++r) {
        RandomStream rng = RandomStream::derive(7, r);
        StaircasePrefix s = sample_staircase(kernel, 6, rng);
        CHECK(s.states == std::vector<int>{0, 1, 2, 3, 3, 3, 3});
    }
}

TEST_CASE("virtual uniform kernel has independent jump events", "[smc]") {
    // Exact check via enumeration: the jump indicators are independent with
    // P(jump at N) = 1/(N+1).
    auto uniform_facts = balayage_facts_by_name("uniform");
    MarginalSequence u = uniform_facts->limits.front().materialize(5);
    SmcKernel kernel(u);
    auto paths = enumerate_staircases(kernel, 5);

    Rational total = 0;
    for (const auto& [s, p] : paths) total += p;
    CHECK(total == 1);

    auto event_prob = [&](const std::vector<int>& jump_levels) {
        Rational acc = 0;
        for (const auto& [s, p] : paths) {
            bool all = true;
            for (int n : jump_levels) all = all && s.at(n + 1) == n + 1;
            if (all) acc += p;
        }
        return acc;
    };
    for (int n = 0; n <= 4; ++n) CHECK(event_prob({n}) == ratio(1, n + 1));
    CHECK(event_prob({1, 3}) == event_prob({1}) * event_prob({3}));
    CHECK(event_prob({0, 2, 4}) == event_prob({0}) * event_prob({2}) * event_prob({4}));
}

TEST_CASE("point marginals of staircase paths", "[smc]") {
    StaircasePrefix flat{{0, 0, 0}};
    MarginalSequence m = point_marginals(flat);
    for (int n = 0; n <= 2; ++n) CHECK(m.level(n) == LevelDistribution::delta(n, 0));

    StaircasePrefix s{{0, 1, 2, 2, 4}};
    MarginalSequence pm = point_marginals(s);
    CHECK(pm.level(1) == LevelDistribution::delta(1, 1));
    CHECK(pm.level(3) == LevelDistribution::delta(3, 2));
    CHECK(pm.level(4) == LevelDistribution::delta(4, 4));

    // Point marginals always sit inside the marginal body.
    RandomStream rng(11);
    SmcKernel kernel(test::random_simplex_member(test::random_balayage(6, rng), 6, rng));
    for (std::uint64_t r = 0; r < 20; ++r) {
        RandomStream stream = RandomStream::derive(3, r);
        StaircasePrefix sample = sample_staircase(kernel, 6, stream);
        sample.validate();
        MarginalSequence point = point_marginals(sample);
        for (int n = 0; n + 1 <= 6; ++n)
            for (int a = 0; a <= n; ++a) CHECK(point.level(n + 1)(a) <= point.level(n)(a));
    }
}

TEST_CASE("enumeration reproduces the marginals exactly", "[smc][property]") {
    RandomStream rng(2718);
    for (int trial = 0; trial < 50; ++trial) {
        Balayage pi = test::random_balayage(4, rng);
        MarginalSequence nu = test::random_simplex_member(pi, 4, rng);
        SmcKernel kernel(nu);
        auto paths = enumerate_staircases(kernel, 4);
        REQUIRE(paths.size() <= 16);

        for (int n = 0; n <= 4; ++n) {
            std::vector<Rational> mass(static_cast<std::size_t>(n) + 1, Rational(0));
            for (const auto& [s, p] : paths) mass[static_cast<std::size_t>(s.at(n))] += p;
            for (int a = 0; a <= n; ++a) CHECK(mass[static_cast<std::size_t>(a)] == nu.level(n)(a));
        }

        // Backward conditionals equal the balayage rows whenever defined.
        for (int n = 0; n + 1 <= 4; ++n) {
            Rational jump_mass = 0;
            std::vector<Rational> joint(static_cast<std::size_t>(n) + 1, Rational(0));
            for (const auto& [s, p] : paths)
                if (s.at(n + 1) == n + 1) {
                    jump_mass += p;
                    joint[static_cast<std::size_t>(s.at(n))] += p;
                }
            if (jump_mass == 0) continue;
            for (int a = 0; a <= n; ++a) CHECK(joint[static_cast<std::size_t>(a)] == jump_mass * pi.row(n)(a));
        }
    }
}

TEST_CASE("empirical marginals and backward checks", "[smc]") {
    Balayage two_down = two_down_balayage(8);
    SmcKernel kernel(delta_point(two_down, 4, 6));
    std::vector<StaircasePrefix> samples;
    for (std::uint64_t r = 0; r < 200; ++r) {
        RandomStream rng = RandomStream::derive(5, r);
        samples.push_back(sample_staircase(kernel, 6, rng));
    }
    EmpiricalMarginals emp = empirical_marginals(samples, kernel.marginals());
    CHECK(emp.max_tv() == 0);  // deterministic law

    BackwardCheck bc = backward_check(samples, two_down, 3);
    CHECK(bc.conditioning_count == 200);
    CHECK(bc.tv == 0);  // conditional is exactly delta_2

    SmcKernel zero(zero_marginals(6));
    std::vector<StaircasePrefix> flat(10, StaircasePrefix{{0, 0, 0, 0, 0, 0, 0}});
    CHECK_THROWS_AS(backward_check(flat, two_down, 2), ConditioningEventUnobserved);
    CHECK_THROWS_AS(empirical_marginals({}, kernel.marginals()), std::invalid_argument);
}

TEST_CASE("sampling is reproducible and stream-independent", "[smc]") {
    auto uniform_facts = balayage_facts_by_name("uniform");
    SmcKernel kernel(uniform_facts->limits.front().materialize(10));
    RandomStream a = RandomStream::derive(42, 3);
    RandomStream b = RandomStream::derive(42, 3);
    CHECK(sample_staircase(kernel, 10, a).states == sample_staircase(kernel, 10, b).states);

    // Different replicate indices give different draws (overwhelmingly).
    RandomStream c = RandomStream::derive(42, 4);
    bool any_diff = false;
    StaircasePrefix sc = sample_staircase(kernel, 10, c);
    RandomStream a2 = RandomStream::derive(42, 3);
    StaircasePrefix sa = sample_staircase(kernel, 10, a2);
    for (int n = 0; n <= 10; ++n) any_diff = any_diff || sa.at(n) != sc.at(n);
    CHECK(any_diff);
}

TEST_CASE("kernel rejects corrupted marginals", "[smc]") {
    MarginalSequence bad;
    bad.levels.push_back(LevelDistribution::delta(0, 0));
    bad.levels.push_back(LevelDistribution(1, {ratio(1, 2), ratio(1, 2)}));
    bad.levels.push_back(LevelDistribution(2, {Rational(1), Rational(0), Rational(0)}));  // mass grew at 0
    CHECK_THROWS_AS(SmcKernel(bad), std::invalid_argument);

    SmcKernel zero(zero_marginals(4));
    CHECK_THROWS_AS(zero.hold_probability(2, 1), InternalUnreachableState);
}
