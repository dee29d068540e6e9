#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "vmc/matrix.hpp"
#include "vmc/vtm.hpp"

namespace vmc {

// The builtin model families plus escape hatches for user matrices.
struct ModelSpec {
    enum class Family { DownFromInfinity, TwoLadders, InfiniteClique, Classical, Explicit };

    Family family = Family::InfiniteClique;
    // down_from_infinity: q[0] is q_1, q[1] is q_2, ...; row a uses q_a and a
    // list shorter than needed repeats its last entry. q_1 is accepted for
    // uniform indexing but no row reads it.
    std::vector<Rational> q;
    std::vector<std::vector<Rational>> classical_matrix;   // finite chain, 0 absorbing
    std::vector<StochasticLevelMatrix> explicit_levels;

    Rational q_at(int a) const {
        if (q.empty()) throw std::invalid_argument("down_from_infinity: empty q list");
        std::size_t i = static_cast<std::size_t>(a) - 1;
        return i < q.size() ? q[i] : q.back();
    }

    std::string family_name() const {
        switch (family) {
            case Family::DownFromInfinity: return "down_from_infinity";
            case Family::TwoLadders: return "two_ladders";
            case Family::InfiniteClique: return "infinite_clique";
            case Family::Classical: return "classical";
            case Family::Explicit: return "explicit";
        }
        return "?";
    }
};

namespace detail {

inline std::vector<std::vector<Rational>> zero_rows(int level) {
    return std::vector<std::vector<Rational>>(static_cast<std::size_t>(level) + 1,
                                              std::vector<Rational>(static_cast<std::size_t>(level) + 1, Rational(0)));
}

inline StochasticLevelMatrix clique_level(int n) {
    StochasticLevelMatrix m;
    m.level = n;
    m.rows = zero_rows(n);
    m.rows[0][0] = 1;
    for (int a = 1; a <= n; ++a)
        for (int b = 1; b <= n; ++b) m.rows[a][b] = ratio(1, n);
    return m;
}

inline StochasticLevelMatrix two_ladders_level(int n) {
    // Valid for n >= 2: states 1 and 2 jump to the top two states, everyone
    // else walks two rungs down.
    StochasticLevelMatrix m;
    m.level = n;
    m.rows = zero_rows(n);
    m.rows[0][0] = 1;
    for (int a : {1, 2}) {
        m.rows[a][n - 1] = ratio(1, 2);
        m.rows[a][n] = ratio(1, 2);
    }
    for (int a = 3; a <= n; ++a) m.rows[a][a - 2] = 1;
    return m;
}

inline StochasticLevelMatrix down_from_infinity_level(int n, const ModelSpec& spec) {
    // Valid for n >= 2: state a steps down to a-1 with probability q_a and
    // jumps to the top state otherwise; state 1 always jumps to the top.
    StochasticLevelMatrix m;
    m.level = n;
    m.rows = zero_rows(n);
    m.rows[0][0] = 1;
    m.rows[1][n] = 1;
    for (int a = 2; a <= n; ++a) {
        Rational qa = spec.q_at(a);
        if (qa < 0 || qa > 1)
            throw std::invalid_argument("down_from_infinity: q_" + std::to_string(a) + " outside [0,1]");
        m.rows[a][a - 1] = qa;
        m.rows[a][n] = 1 - qa;
    }
    return m;
}

inline StochasticLevelMatrix classical_level(int n, const std::vector<std::vector<Rational>>& p) {
    // Valid for n >= top state of the finite chain; states above it are
    // unreachable and just self-loop, which the projection maps to themselves.
    const int top = static_cast<int>(p.size()) - 1;
    StochasticLevelMatrix m;
    m.level = n;
    m.rows = zero_rows(n);
    for (int a = 0; a <= top; ++a)
        for (int b = 0; b <= top; ++b) m.rows[a][b] = p[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
    for (int a = top + 1; a <= n; ++a) m.rows[a][a] = 1;
    return m;
}

}  // namespace detail

inline VtmPrefix make_vtm(const ModelSpec& spec) {
    using Family = ModelSpec::Family;
    if (spec.family == Family::Explicit) return VtmPrefix(spec.explicit_levels);

    int pattern_min = 0;
    VtmPrefix::Generator pattern;
    switch (spec.family) {
        case Family::InfiniteClique:
            pattern_min = 1;
            pattern = [](int n) { return detail::clique_level(n); };
            break;
        case Family::TwoLadders:
            pattern_min = 2;
            pattern = [](int n) { return detail::two_ladders_level(n); };
            break;
        case Family::DownFromInfinity:
            pattern_min = 2;
            pattern = [spec](int n) { return detail::down_from_infinity_level(n, spec); };
            break;
        case Family::Classical: {
            StochasticLevelMatrix chain;
            chain.level = static_cast<int>(spec.classical_matrix.size()) - 1;
            chain.rows = spec.classical_matrix;
            chain.validate("classical matrix");
            pattern_min = chain.level;
            auto p = spec.classical_matrix;
            pattern = [p](int n) { return detail::classical_level(n, p); };
            break;
        }
        case Family::Explicit:
            break;  // handled above
    }

    auto gen = [pattern, pattern_min](int n) {
        if (n >= pattern_min) return pattern(n);
        StochasticLevelMatrix m = pattern(pattern_min);
        for (int l = pattern_min; l > n; --l) m = project_matrix(m);
        return m;
    };
    return VtmPrefix(gen, -1);
}

}  // namespace vmc
