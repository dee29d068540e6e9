#include <catch2/catch_amalgamated.hpp>

#include <thread>

#include "test_helpers.hpp"
#include "vmc/families.hpp"
#include "vmc/json_io.hpp"
#include "vmc/matrix.hpp"
#include "vmc/vid.hpp"
#include "vmc/vtm.hpp"

using namespace vmc;

namespace {

ModelSpec clique_spec() { return ModelSpec{ModelSpec::Family::InfiniteClique, {}, {}, {}}; }
ModelSpec ladders_spec() { return ModelSpec{ModelSpec::Family::TwoLadders, {}, {}, {}}; }
ModelSpec dfi_spec(std::vector<Rational> q) {
    return ModelSpec{ModelSpec::Family::DownFromInfinity, std::move(q), {}, {}};
}

}  // namespace

TEST_CASE("matrix projection on the clique", "[kernels]") {
    VtmPrefix clique = make_vtm(clique_spec());
    StochasticLevelMatrix k2 = project_matrix(clique.level(3));
    // 1/3 + (1/3)(1/3)/(1 - 1/3) = 1/2 on the whole body.
    for (int a = 1; a <= 2; ++a)
        for (int b = 1; b <= 2; ++b) CHECK(k2.at(a, b) == ratio(1, 2));
    CHECK(k2.at(1, 0) == 0);
    CHECK(k2 == clique.level(2));
}

TEST_CASE("matrix projection trapped-mass branch", "[kernels]") {
    // Column 2 empty, state 2 a self-loop: the projection deletes it verbatim.
    StochasticLevelMatrix k;
    k.level = 2;
    k.rows = {{Rational(1), Rational(0), Rational(0)},
              {ratio(1, 2), ratio(1, 2), Rational(0)},
              {Rational(0), Rational(0), Rational(1)}};
    StochasticLevelMatrix lower = project_matrix(k);
    CHECK(lower.at(0, 0) == 1);
    CHECK(lower.at(1, 0) == ratio(1, 2));
    CHECK(lower.at(1, 1) == ratio(1, 2));
    CHECK(balayage_row(k) == LevelDistribution::delta(1, 0));
}

TEST_CASE("matrix projection rejects malformed input", "[kernels]") {
    StochasticLevelMatrix bad;
    bad.level = 1;
    bad.rows = {{Rational(1), Rational(0)}, {ratio(1, 2), ratio(1, 3)}};
    CHECK_THROWS_AS(project_matrix(bad), std::invalid_argument);
}

TEST_CASE("family matrices match their closed forms", "[kernels]") {
    VtmPrefix ladders = make_vtm(ladders_spec());
    StochasticLevelMatrix k5 = ladders.level(5);
    for (int a : {1, 2}) {
        CHECK(k5.at(a, 4) == ratio(1, 2));
        CHECK(k5.at(a, 5) == ratio(1, 2));
    }
    CHECK(k5.at(3, 1) == 1);
    CHECK(k5.at(4, 2) == 1);
    CHECK(k5.at(5, 3) == 1);
    CHECK(ladders.level(1).at(1, 1) == 1);  // projection-derived bottom level

    VtmPrefix clique = make_vtm(clique_spec());
    for (int b = 1; b <= 4; ++b) CHECK(clique.level(4).at(2, b) == ratio(1, 4));

    VtmPrefix all_down = make_vtm(dfi_spec({Rational(1)}));
    StochasticLevelMatrix k3 = all_down.level(3);
    CHECK(k3.at(1, 3) == 1);
    CHECK(k3.at(2, 1) == 1);
    CHECK(k3.at(3, 2) == 1);
}

TEST_CASE("builtin families are projective", "[kernels]") {
    for (const ModelSpec& spec :
         {clique_spec(), ladders_spec(), dfi_spec({ratio(1, 2)}), dfi_spec({ratio(1, 2), ratio(1, 3), ratio(2, 3)})}) {
        VtmPrefix vtm = make_vtm(spec);
        CHECK(validate_vtm(vtm, 16).empty());
    }
}

TEST_CASE("classical embedding pads and projects", "[kernels]") {
    ModelSpec spec;
    spec.family = ModelSpec::Family::Classical;
    spec.classical_matrix = {{Rational(1), Rational(0)}, {ratio(1, 4), ratio(3, 4)}};
    VtmPrefix vtm = make_vtm(spec);
    CHECK(validate_vtm(vtm, 8).empty());
    CHECK(vtm.level(5).at(1, 1) == ratio(3, 4));
    CHECK(vtm.level(5).at(3, 3) == 1);  // unreachable padding self-loops
    CHECK(vtm.level(0).at(0, 0) == 1);
}

TEST_CASE("balayage extraction", "[kernels]") {
    Balayage clique_pi = balayage_of_vtm(make_vtm(clique_spec()), 8);
    CHECK(clique_pi.row(0) == LevelDistribution::delta(0, 0));
    for (int n = 1; n < 8; ++n) CHECK(clique_pi.row(n) == LevelDistribution::uniform_positive(n));

    Balayage down_pi = balayage_of_vtm(make_vtm(dfi_spec({ratio(1, 2)})), 8);
    for (int n = 1; n < 8; ++n) CHECK(down_pi.row(n) == LevelDistribution::delta(n, n));

    // The ladders balayage pins level 1 at state 1, unlike the pure two-down.
    Balayage ladder_pi = balayage_of_vtm(make_vtm(ladders_spec()), 8);
    CHECK(ladder_pi.row(1) == LevelDistribution::delta(1, 1));
    for (int n = 2; n < 8; ++n) CHECK(ladder_pi.row(n) == LevelDistribution::delta(n, n - 1));
}

TEST_CASE("balayage commutes with prefix truncation", "[kernels]") {
    VtmPrefix vtm = make_vtm(ladders_spec());
    Balayage full = balayage_of_vtm(vtm, 12);
    Balayage cut = balayage_of_vtm(vtm, 6);
    for (int n = 0; n < 6; ++n) CHECK(full.row(n) == cut.row(n));
}

TEST_CASE("compatibility checks", "[kernels]") {
    VtmPrefix clique = make_vtm(clique_spec());

    // The delta-at-1 VID holds state 1 at every level.
    VidPrefix delta1;
    delta1.levels.push_back(LevelDistribution::delta(0, 0));
    for (int n = 1; n <= 6; ++n) delta1.levels.push_back(LevelDistribution::delta(n, 1));
    CHECK(validate_compatibility(delta1, clique).empty());
    CHECK(validate_vid(delta1).empty());

    VidPrefix zero;
    for (int n = 0; n <= 6; ++n) zero.levels.push_back(LevelDistribution::delta(n, 0));
    CHECK(validate_compatibility(zero, clique).empty());

    VidPrefix bad;
    bad.levels.push_back(LevelDistribution::delta(0, 0));
    bad.levels.push_back(LevelDistribution(1, {ratio(1, 2), ratio(1, 2)}));
    bad.levels.push_back(LevelDistribution(2, {Rational(0), Rational(0), Rational(1)}));
    auto report = validate_compatibility(bad, clique);
    REQUIRE(report.size() == 1);
    CHECK(report[0].level == 1);
    CHECK(report[0].state == 0);
}

TEST_CASE("compatible pairs are monotone automatically", "[kernels][property]") {
    RandomStream rng(31337);
    for (int trial = 0; trial < 60; ++trial) {
        int top = 2 + static_cast<int>(rng.next() % 6);
        VtmPrefix vtm = test::random_vtm(top, rng);
        VidPrefix vid = test::random_compatible_vid(vtm, top, rng);
        CHECK(validate_compatibility(vid, vtm).empty());
        CHECK(validate_vid(vid).empty());
    }
}

TEST_CASE("model JSON round trips bit-exactly", "[kernels][json]") {
    for (const ModelSpec& spec : {clique_spec(), ladders_spec(), dfi_spec({ratio(1, 2), ratio(1, 3)})}) {
        json j = model_to_json(spec);
        ModelSpec back = model_from_json(json::parse(j.dump()));
        CHECK(back.family == spec.family);
        CHECK(back.q == spec.q);
        CHECK(model_to_json(back).dump() == j.dump());
    }

    ModelSpec expl;
    expl.family = ModelSpec::Family::Explicit;
    RandomStream rng(5);
    expl.explicit_levels.push_back(StochasticLevelMatrix{0, {{Rational(1)}}});
    StochasticLevelMatrix k1 = project_matrix(test::random_stochastic_matrix(2, rng));
    expl.explicit_levels.push_back(k1);
    json j = model_to_json(expl);
    ModelSpec back = model_from_json(json::parse(j.dump()));
    REQUIRE(back.explicit_levels.size() == 2);
    CHECK(back.explicit_levels[1] == expl.explicit_levels[1]);
}

TEST_CASE("down_from_infinity q list handling", "[kernels]") {
    ModelSpec spec = dfi_spec({ratio(1, 2), ratio(1, 3)});
    CHECK(spec.q_at(1) == ratio(1, 2));
    CHECK(spec.q_at(2) == ratio(1, 3));
    CHECK(spec.q_at(9) == ratio(1, 3));  // last entry repeats
    CHECK_THROWS_AS(model_from_json(json::parse(R"({"family":"down_from_infinity","q":["3/2"]})")),
                    std::invalid_argument);
}

TEST_CASE("generator cache is shared and consistent across threads", "[kernels]") {
    VtmPrefix clique = make_vtm(clique_spec());
    std::vector<std::thread> pool;
    std::vector<Rational> seen(8);
    for (int t = 0; t < 8; ++t)
        pool.emplace_back([&clique, &seen, t] { seen[static_cast<std::size_t>(t)] = clique.level(12).at(3, 3); });
    for (auto& th : pool) th.join();
    for (const Rational& r : seen) CHECK(r == ratio(1, 12));
}

TEST_CASE("vtm prefix rejects bad levels", "[kernels]") {
    VtmPrefix bounded = make_vtm(clique_spec());
    CHECK_THROWS_AS(bounded.level(-1), std::out_of_range);

    std::vector<StochasticLevelMatrix> levels{StochasticLevelMatrix{0, {{Rational(1)}}}};
    VtmPrefix explicit_vtm(levels);
    CHECK_THROWS_AS(explicit_vtm.level(1), std::out_of_range);
}
