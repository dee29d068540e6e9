#include <catch2/catch_amalgamated.hpp>

#include "test_helpers.hpp"
#include "vmc/catalog.hpp"
#include "vmc/extended_balayage.hpp"
#include "vmc/families.hpp"
#include "vmc/marginal.hpp"

using namespace vmc;

namespace {

// Expected delta-point prefixes of the three catalog balayages, frozen by
// unrolling the backward recursion by hand. Levels 0..4, delta states only
// except the uniform rows.
MarginalSequence expected_rows(const std::vector<LevelDistribution>& rows) {
    MarginalSequence m;
    m.levels = rows;
    return m;
}

}  // namespace

TEST_CASE("delta point tables for the catalog balayages", "[simplex]") {
    using D = LevelDistribution;
    Balayage down = down_balayage(8);
    Balayage two_down = two_down_balayage(8);
    Balayage uniform = uniform_balayage(8);

    // Single-step-down balayage: delta_a holds min(N, a).
    for (int a = 1; a <= 4; ++a) {
        MarginalSequence d = delta_point(down, a, 4);
        for (int n = 0; n <= 4; ++n) CHECK(d.level(n) == D::delta(n, std::min(n, a)));
    }

    // Two-step-down balayage.
    CHECK(delta_point(two_down, 1, 4).prefix_equal(
        expected_rows({D::delta(0, 0), D::delta(1, 1), D::delta(2, 1), D::delta(3, 1), D::delta(4, 1)})));
    CHECK(delta_point(two_down, 2, 4).prefix_equal(
        expected_rows({D::delta(0, 0), D::delta(1, 0), D::delta(2, 2), D::delta(3, 2), D::delta(4, 2)})));
    CHECK(delta_point(two_down, 3, 4).prefix_equal(
        expected_rows({D::delta(0, 0), D::delta(1, 1), D::delta(2, 1), D::delta(3, 3), D::delta(4, 3)})));
    CHECK(delta_point(two_down, 4, 4).prefix_equal(
        expected_rows({D::delta(0, 0), D::delta(1, 0), D::delta(2, 2), D::delta(3, 2), D::delta(4, 4)})));

    // Uniform balayage.
    CHECK(delta_point(uniform, 3, 4).prefix_equal(expected_rows(
        {D::delta(0, 0), D::delta(1, 1), D::uniform_positive(2), D::delta(3, 3), D::delta(4, 3)})));
    CHECK(delta_point(uniform, 4, 4).prefix_equal(
        expected_rows({D::delta(0, 0), D::delta(1, 1), D::uniform_positive(2), D::uniform_positive(3),
                       D::delta(4, 4)})));

    // State 0 is the all-zero sequence for every balayage.
    for (const Balayage* pi : {&down, &two_down, &uniform})
        CHECK(delta_point(*pi, 0, 4).prefix_equal(zero_marginals(4)));
}

TEST_CASE("delta points belong to their simplex", "[simplex][property]") {
    RandomStream rng(99);
    for (int trial = 0; trial < 40; ++trial) {
        Balayage pi = test::random_balayage(8, rng);
        for (int a = 0; a <= 9; ++a) CHECK(membership(delta_point(pi, a, 8), pi).member);
    }
}

TEST_CASE("representing matrix agrees with the delta points", "[simplex][property]") {
    // Two independent routes: the sum recursion in the table, the backward
    // level recursion in delta_point. They must coincide entry for entry.
    RandomStream rng(1234);
    for (int trial = 0; trial < 25; ++trial) {
        Balayage pi = test::random_balayage(10, rng);
        ExtendedBalayageTable table(pi, 16);
        for (int a = 0; a <= 11; ++a) {
            MarginalSequence d = delta_point(pi, a, 10);
            for (int n = 0; n <= std::min(a, 10); ++n) CHECK(table.at(a, n) == d.level(n));
        }
        for (int n = 0; n < 10; ++n) CHECK(table.at(n + 1, n) == pi.row(n));  // pi_{N+1,N} = pi_N
    }
}

TEST_CASE("extended balayage closed forms", "[simplex]") {
    Balayage uniform = uniform_balayage(12);
    ExtendedBalayageTable table(uniform, 16);
    for (int n = 1; n <= 6; ++n) {
        CHECK(table.at(n, n) == LevelDistribution::delta(n, n));
        for (int a = n + 1; a <= 12; ++a) CHECK(table.at(a, n) == LevelDistribution::uniform_positive(n));
    }

    Balayage down = down_balayage(12);
    CHECK(extended_balayage(down, 5, 2) == LevelDistribution::delta(2, 2));

    CHECK_THROWS_AS(extended_balayage(down, 5, 2, 4), std::invalid_argument);  // a over the guard
}

TEST_CASE("table entries are truncation-stable", "[simplex]") {
    Balayage pi = two_down_balayage(12);
    ExtendedBalayageTable small(pi, 8);
    ExtendedBalayageTable large(pi, 64);
    for (int n = 0; n <= 4; ++n)
        for (int a = n; a <= 8; ++a) CHECK(small.at(a, n) == large.at(a, n));
}

TEST_CASE("membership checks and first violations", "[simplex]") {
    Balayage down = down_balayage(8);
    Balayage two_down = two_down_balayage(8);

    CHECK(membership(zero_marginals(8), down).member);
    CHECK(membership(zero_marginals(8), two_down).member);

    MarginalSequence d2 = delta_point(down, 2, 8);
    CHECK(membership(d2, down).member);

    MembershipResult bad = membership(d2, two_down);
    REQUIRE_FALSE(bad.member);
    CHECK(bad.level == 1);
    CHECK(bad.state == 0);
}

TEST_CASE("rows of the builtin transition matrices", "[simplex]") {
    VtmPrefix clique = make_vtm(ModelSpec{ModelSpec::Family::InfiniteClique, {}, {}, {}});
    for (int a : {1, 2, 5}) {
        MarginalSequence row = row_of_vtm(clique, a, 8);
        CHECK(row.level(0) == LevelDistribution::delta(0, 0));
        for (int n = 1; n <= 8; ++n) CHECK(row.level(n) == LevelDistribution::uniform_positive(n));
    }

    VtmPrefix ladders = make_vtm(ModelSpec{ModelSpec::Family::TwoLadders, {}, {}, {}});
    Balayage ladders_pi = balayage_of_vtm(ladders, 9);
    for (int a : {3, 4, 6}) {
        MarginalSequence row = row_of_vtm(ladders, a, 8);
        CHECK(row.prefix_equal(delta_point(ladders_pi, a - 2, 8)));
    }

    ModelSpec dfi{ModelSpec::Family::DownFromInfinity, {ratio(1, 3)}, {}, {}};
    VtmPrefix down_vtm = make_vtm(dfi);
    Balayage down_pi = balayage_of_vtm(down_vtm, 9);
    auto limit = balayage_facts_by_name("down")->limits.front();
    for (int a : {2, 4}) {
        MarginalSequence row = row_of_vtm(down_vtm, a, 8);
        MarginalSequence expected = mix_marginals({{ratio(1, 3), delta_point(down_pi, a - 1, 8)},
                                                   {ratio(2, 3), limit.materialize(8)}});
        CHECK(row.prefix_equal(expected));
    }
    CHECK(row_of_vtm(down_vtm, 1, 8).prefix_equal(limit.materialize(8)));

    CHECK_THROWS_AS(row_of_vtm(clique, 0, 8), std::invalid_argument);
}

TEST_CASE("rows live in the simplex of their matrix", "[simplex][property]") {
    RandomStream rng(451);
    for (int trial = 0; trial < 20; ++trial) {
        VtmPrefix vtm = test::random_vtm(7, rng);
        Balayage pi = balayage_of_vtm(vtm, 7);
        for (int a = 1; a <= 5; ++a) CHECK(membership(row_of_vtm(vtm, a, 7), pi).member);
    }
}

TEST_CASE("second-moment statistic closed form on the uniform balayage", "[simplex]") {
    Balayage uniform = uniform_balayage(40);
    for (int m = 1; m <= 3; ++m) {
        for (int c = 1; c <= m; ++c) {
            SternfeldScan scan(uniform, m, c);
            for (int n = std::max(m, 2); n <= 12; n += 2) {
                SternfeldStatistic st = scan.at(n, n, n + 6);
                Rational closed = ratio(1, n) + Rational(n - m) / (Rational(n) * m * m);
                for (const SternfeldRow& row : st.rows) {
                    if (row.a == n) {
                        CHECK(row.sum == row.target);  // base-case boundary
                    } else {
                        CHECK(row.sum == closed);
                        CHECK(row.target == ratio(1, m * m));
                    }
                    CHECK(row.abs_dev * n <= 2);  // |sum - target| <= 2/N
                }
            }
        }
    }
}

TEST_CASE("second-moment statistic degenerate cases", "[simplex]") {
    Balayage down = down_balayage(24);
    SternfeldStatistic st = sternfeld_statistic(down, 1, 1, 6, 6, 12);
    for (const SternfeldRow& row : st.rows) {
        CHECK(row.sum == 1);
        CHECK(row.target == 1);
    }
    CHECK(st.sup_abs_dev == 0);

    // M = N with a = N: tautological equality.
    Balayage uniform = uniform_balayage(12);
    SternfeldStatistic boundary = sternfeld_statistic(uniform, 5, 2, 5, 5, 5);
    REQUIRE(boundary.rows.size() == 1);
    CHECK(boundary.rows[0].sum == boundary.rows[0].target);
}

TEST_CASE("top-coordinate sequences", "[simplex]") {
    Balayage uniform = uniform_balayage(24);
    for (int n : {2, 5, 9}) {
        std::vector<Rational> seq = k0_sequence(uniform, n, n, n + 8);
        CHECK(seq.front() == 1);  // a = N is the point mass
        for (std::size_t i = 1; i < seq.size(); ++i) CHECK(seq[i] == ratio(1, n));
    }

    std::vector<Rational> alternating = k0_sequence(two_down_balayage(24), 2, 2, 9);
    std::vector<Rational> expected{1, 0, 1, 0, 1, 0, 1, 0};
    CHECK(std::vector<Rational>(alternating.begin(), alternating.end()) == expected);

    std::vector<Rational> constant = k0_sequence(down_balayage(24), 2, 2, 9);
    for (const Rational& v : constant) CHECK(v == 1);
}

TEST_CASE("limit scans recover the catalog limit points", "[simplex]") {
    LimitScanResult down_scan = limit_scan(down_balayage(16), 3, 0, 12);
    auto down_cands = down_scan.candidates();
    REQUIRE(down_cands.size() == 1);
    for (int n = 0; n <= 3; ++n) CHECK(down_cands[0]->prefix[static_cast<std::size_t>(n)] ==
                                       LevelDistribution::delta(n, n));

    LimitScanResult two_scan = limit_scan(two_down_balayage(16), 3, 0, 12);
    CHECK(two_scan.candidates().size() == 2);

    LimitScanResult uni_scan = limit_scan(uniform_balayage(16), 3, 4, 12);
    auto uni_cands = uni_scan.candidates();
    REQUIRE(uni_cands.size() == 1);
    for (int n = 1; n <= 3; ++n)
        CHECK(uni_cands[0]->prefix[static_cast<std::size_t>(n)] == LevelDistribution::uniform_positive(n));
}

TEST_CASE("catalog limit forms satisfy membership", "[simplex]") {
    struct Case {
        const char* name;
        Balayage pi;
    };
    for (auto& [name, pi] : {Case{"down", down_balayage(10)}, Case{"two_down", two_down_balayage(10)},
                             Case{"uniform", uniform_balayage(10)}}) {
        auto facts = balayage_facts_by_name(name);
        REQUIRE(facts.has_value());
        for (const LimitPointForm& form : facts->limits)
            CHECK(membership(form.materialize(10), pi).member);
    }

    // The ladders-derived limits belong to the ladders balayage, not two_down.
    VtmPrefix ladders = make_vtm(ModelSpec{ModelSpec::Family::TwoLadders, {}, {}, {}});
    Balayage ladders_pi = balayage_of_vtm(ladders, 11);
    ModelFacts facts = model_facts(ModelSpec{ModelSpec::Family::TwoLadders, {}, {}, {}});
    REQUIRE(facts.balayage.has_value());
    for (const LimitPointForm& form : facts.balayage->limits) {
        CHECK(membership(form.materialize(10), ladders_pi).member);
        CHECK_FALSE(membership(form.materialize(10), two_down_balayage(10)).member);
    }
}

TEST_CASE("second moments contract along levels", "[simplex][property]") {
    RandomStream rng(8080);
    for (int trial = 0; trial < 40; ++trial) {
        Balayage pi = test::random_balayage(9, rng);
        MarginalSequence nu = test::random_simplex_member(pi, 9, rng);
        for (int m = 1; m <= 3; ++m) {
            for (int c = 0; c <= m; ++c) {
                std::vector<Rational> profile = second_moment_profile(nu, pi, m, c);
                for (std::size_t i = 1; i < profile.size(); ++i) CHECK(profile[i] <= profile[i - 1]);
            }
        }
    }
}

TEST_CASE("scan sweep matches the one-shot statistic", "[simplex]") {
    Balayage uniform = uniform_balayage(20);
    SternfeldScan scan(uniform, 2, 1);
    for (int n = 2; n <= 10; ++n) {
        SternfeldStatistic a = scan.at(n, n, n + 4);
        SternfeldStatistic b = sternfeld_statistic(uniform, 2, 1, n, n, n + 4);
        REQUIRE(a.rows.size() == b.rows.size());
        for (std::size_t i = 0; i < a.rows.size(); ++i) {
            CHECK(a.rows[i].sum == b.rows[i].sum);
            CHECK(a.rows[i].target == b.rows[i].target);
        }
    }
}
