#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vmc/balayage.hpp"
#include "vmc/distribution.hpp"
#include "vmc/errors.hpp"
#include "vmc/vid.hpp"
#include "vmc/vtm.hpp"

namespace vmc {

// Optional symbolic identity of a marginal sequence. A tag pins down the
// levels beyond the materialized prefix, which is what lets evidence built
// from a finite truncation stand for the infinite object.
struct MarginalTag {
    enum class Kind { Untagged, Zero, DeltaPoint, Row, LimitPoint };
    Kind kind = Kind::Untagged;
    int a = -1;
    std::string label;

    static MarginalTag none() { return {}; }
    static MarginalTag zero() { return {Kind::Zero, 0, {}}; }
    static MarginalTag delta_point(int a) { return {Kind::DeltaPoint, a, {}}; }
    static MarginalTag row(int a) { return {Kind::Row, a, {}}; }
    static MarginalTag limit_point(std::string label) { return {Kind::LimitPoint, -1, std::move(label)}; }
};

// Finite prefix of a projectively consistent sequence of level distributions.
struct MarginalSequence {
    std::vector<LevelDistribution> levels;
    MarginalTag tag;

    int top_level() const { return static_cast<int>(levels.size()) - 1; }

    const LevelDistribution& level(int n) const {
        if (n < 0 || n > top_level())
            throw std::out_of_range("MarginalSequence: level " + std::to_string(n) + " not materialized");
        return levels[static_cast<std::size_t>(n)];
    }

    bool prefix_equal(const MarginalSequence& o) const {
        int l = std::min(top_level(), o.top_level());
        for (int n = 0; n <= l; ++n)
            if (level(n) != o.level(n)) return false;
        return true;
    }
};

inline MarginalSequence zero_marginals(int top_level) {
    MarginalSequence m;
    m.tag = MarginalTag::zero();
    for (int n = 0; n <= top_level; ++n) m.levels.push_back(LevelDistribution::delta(n, 0));
    return m;
}

struct MembershipResult {
    bool member = true;
    int level = -1;  // first violated recursion level, when not a member
    int state = -1;

    explicit operator bool() const { return member; }
};

// Exact membership in the simplex cut out by a balayage: every level must be
// its successor plus the successor's top mass spread along the balayage row.
inline MembershipResult membership(const MarginalSequence& nu, const Balayage& pi) {
    for (int n = 0; n + 1 <= nu.top_level(); ++n) {
        const LevelDistribution& lower = nu.level(n);
        const LevelDistribution& upper = nu.level(n + 1);
        const Rational& jump_mass = upper(n + 1);
        const LevelDistribution& row = pi.row(n);
        for (int a = 0; a <= n; ++a)
            if (lower(a) != upper(a) + jump_mass * row(a)) return {false, n, a};
    }
    return {};
}

namespace detail {

// One backward step: fold the top state's mass down along the balayage row.
inline LevelDistribution pull_down(const LevelDistribution& upper, const LevelDistribution& pi_row) {
    LevelDistribution lower;
    lower.level = upper.level - 1;
    lower.weights.assign(static_cast<std::size_t>(upper.level), Rational(0));
    const Rational& jump_mass = upper(upper.level);
    for (int a = 0; a < upper.level; ++a)
        lower.weights[static_cast<std::size_t>(a)] = upper(a) + jump_mass * pi_row(a);
    return lower;
}

// Extends a known level-`from` distribution to a full prefix 0..top_level:
// `above(n)` supplies levels beyond `from`, the balayage recursion fills the
// levels below it.
inline std::vector<LevelDistribution> extend_by_recursion(const LevelDistribution& at_from,
                                                          const Balayage& pi, int top_level,
                                                          const std::function<LevelDistribution(int)>& above) {
    const int from = at_from.level;
    std::vector<LevelDistribution> levels(static_cast<std::size_t>(top_level) + 1);
    for (int n = from; n <= top_level; ++n)
        levels[static_cast<std::size_t>(n)] = n == from ? at_from : above(n);
    LevelDistribution cur = at_from;
    for (int n = from - 1; n >= 0; --n) {
        cur = pull_down(cur, pi.row(n));
        if (n <= top_level) levels[static_cast<std::size_t>(n)] = cur;
    }
    return levels;
}

}  // namespace detail

// The extreme point "started at a": a point mass at a from level a upward,
// extended downward by the balayage recursion.
inline MarginalSequence delta_point(const Balayage& pi, int a, int top_level) {
    if (a < 0) throw std::invalid_argument("delta_point: negative state");
    if (a > 0 && pi.max_level() < a - 1)
        throw std::invalid_argument("delta_point: balayage too short for state " + std::to_string(a));
    MarginalSequence m;
    m.tag = a == 0 ? MarginalTag::zero() : MarginalTag::delta_point(a);
    m.levels = detail::extend_by_recursion(LevelDistribution::delta(a, a), pi, top_level,
                                           [a](int n) { return LevelDistribution::delta(n, a); });
    return m;
}

// The a-th row of a VTM as a marginal sequence: K_N(a, .) from level a upward,
// the unique balayage-consistent extension below. Row 0 is the constant zero
// sequence and is rejected here; use zero_marginals for it.
inline MarginalSequence row_of_vtm(const VtmPrefix& vtm, int a, int top_level) {
    if (a < 1) throw std::invalid_argument("row_of_vtm: a must be >= 1 (row 0 is the zero sequence)");
    if (top_level < a) throw std::invalid_argument("row_of_vtm: need top_level >= a");
    Balayage pi = balayage_of_vtm(vtm, a);
    auto row_at = [&vtm, a](int n) {
        LevelDistribution d;
        d.level = n;
        d.weights = vtm.level(n).rows[static_cast<std::size_t>(a)];
        return d;
    };
    MarginalSequence m;
    m.tag = MarginalTag::row(a);
    m.levels = detail::extend_by_recursion(row_at(a), pi, top_level, row_at);
    return m;
}

// Exact convex combination of already-materialized sequences.
inline MarginalSequence mix_marginals(const std::vector<std::pair<Rational, MarginalSequence>>& parts) {
    if (parts.empty()) throw std::invalid_argument("mix_marginals: empty mixture");
    Rational total = 0;
    int top = parts.front().second.top_level();
    for (const auto& [w, seq] : parts) {
        if (w < 0) throw std::invalid_argument("mix_marginals: negative weight");
        total += w;
        top = std::min(top, seq.top_level());
    }
    if (total != 1) throw std::invalid_argument("mix_marginals: weights sum to " + to_fraction_string(total));
    MarginalSequence out;
    for (int n = 0; n <= top; ++n) {
        LevelDistribution d;
        d.level = n;
        d.weights.assign(static_cast<std::size_t>(n) + 1, Rational(0));
        for (const auto& [w, seq] : parts)
            for (int s = 0; s <= n; ++s) d.weights[static_cast<std::size_t>(s)] += w * seq.level(n)(s);
        out.levels.push_back(std::move(d));
    }
    return out;
}

inline MarginalSequence marginals_of_vid(const VidPrefix& vid) {
    MarginalSequence m;
    m.levels = vid.levels;
    return m;
}

inline VidPrefix vid_of_marginals(const MarginalSequence& m) {
    VidPrefix v;
    v.levels = m.levels;
    return v;
}

}  // namespace vmc
