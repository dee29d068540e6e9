#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vmc/balayage.hpp"
#include "vmc/distribution.hpp"
#include "vmc/families.hpp"
#include "vmc/marginal.hpp"

namespace vmc {

// A subsequential limit of delta points, given in closed form per level, with
// its known extremality status.
struct LimitPointForm {
    std::string label;
    std::function<LevelDistribution(int)> row;
    bool extreme = true;

    MarginalSequence materialize(int top_level) const {
        MarginalSequence m;
        m.tag = MarginalTag::limit_point(label);
        for (int n = 0; n <= top_level; ++n) m.levels.push_back(row(n));
        return m;
    }
};

struct BalayageFacts {
    std::string name;
    bool extreme_set_compact = false;
    std::vector<LimitPointForm> limits;
};

namespace detail {

inline LevelDistribution down_limit_row(int n) { return LevelDistribution::delta(n, n); }

inline LevelDistribution uniform_limit_row(int n) {
    return n == 0 ? LevelDistribution::delta(0, 0) : LevelDistribution::uniform_positive(n);
}

// Limits of the pure two-down balayage (pi_1 = delta_0).
inline LevelDistribution two_down_even_row(int n) {
    if (n % 2 == 0) return LevelDistribution::delta(n, n);
    return LevelDistribution::delta(n, n - 1);
}
inline LevelDistribution two_down_odd_row(int n) {
    if (n == 0) return LevelDistribution::delta(0, 0);
    if (n % 2 == 1) return LevelDistribution::delta(n, n);
    return LevelDistribution::delta(n, n - 1);
}

// Limits of the two-ladders balayage, which pins pi_1 = delta_1 instead.
inline LevelDistribution ladders_even_row(int n) {
    if (n == 1) return LevelDistribution::delta(1, 1);
    return two_down_even_row(n);
}
inline LevelDistribution ladders_odd_row(int n) {
    if (n == 1) return LevelDistribution::delta(1, 1);
    return two_down_odd_row(n);
}

}  // namespace detail

// Facts for the named pure balayages.
inline std::optional<BalayageFacts> balayage_facts_by_name(const std::string& name) {
    if (name == "down")
        return BalayageFacts{"down", true, {{"down_limit", detail::down_limit_row, true}}};
    if (name == "two_down")
        return BalayageFacts{"two_down",
                             true,
                             {{"even_limit", detail::two_down_even_row, true},
                              {"odd_limit", detail::two_down_odd_row, true}}};
    if (name == "uniform")
        return BalayageFacts{"uniform", true, {{"virtual_uniform", detail::uniform_limit_row, true}}};
    return std::nullopt;
}

inline Balayage balayage_by_name(const std::string& name, int max_level) {
    if (name == "down") return down_balayage(max_level);
    if (name == "two_down") return two_down_balayage(max_level);
    if (name == "uniform") return uniform_balayage(max_level);
    throw std::invalid_argument("unknown balayage '" + name + "' (expected down|two_down|uniform)");
}

// What all rows K(a,.) beyond a finite prefix look like, when the family
// settles into a closed form.
struct RowTailFact {
    int from_a = 1;
    bool all_extreme = false;  // false means all rows from from_a on are non-extreme
};

struct ModelFacts {
    std::optional<BalayageFacts> balayage;
    std::optional<RowTailFact> row_tail;
    // Every level's positive part {1..N} is a single closed communicating
    // class, so visit classification reduces to the VID's mass at 0.
    bool all_levels_irreducible_closed = false;
};

inline ModelFacts model_facts(const ModelSpec& spec) {
    using Family = ModelSpec::Family;
    ModelFacts facts;
    switch (spec.family) {
        case Family::InfiniteClique:
            facts.balayage = balayage_facts_by_name("uniform");
            facts.row_tail = RowTailFact{1, true};
            facts.all_levels_irreducible_closed = true;
            break;
        case Family::TwoLadders:
            facts.balayage = BalayageFacts{"two_ladders",
                                           true,
                                           {{"even_limit", detail::ladders_even_row, true},
                                            {"odd_limit", detail::ladders_odd_row, true}}};
            facts.row_tail = RowTailFact{3, true};
            facts.all_levels_irreducible_closed = true;
            break;
        case Family::DownFromInfinity: {
            bool all_positive = true, tail_degenerate = false;
            for (const Rational& qa : spec.q) all_positive = all_positive && qa > 0;
            if (spec.q.empty()) all_positive = false;
            if (all_positive) {
                facts.balayage = balayage_facts_by_name("down");
                facts.all_levels_irreducible_closed = true;
                // Rows settle once the q list is exhausted and repeats.
                tail_degenerate = spec.q.back() == 1;
                int settled = static_cast<int>(spec.q.size()) + 1;
                facts.row_tail = RowTailFact{std::max(2, settled), tail_degenerate};
            }
            break;
        }
        case Family::Classical:
        case Family::Explicit:
            break;  // no closed-form facts; the evaluator degrades honestly
    }
    return facts;
}

}  // namespace vmc
