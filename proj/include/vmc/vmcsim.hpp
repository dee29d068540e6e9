#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vmc/linsolve.hpp"
#include "vmc/marginal.hpp"
#include "vmc/path.hpp"
#include "vmc/rng.hpp"
#include "vmc/vid.hpp"
#include "vmc/vtm.hpp"

namespace vmc {

// Samples a virtual chain by simulating only the top level and projecting
// down, which makes the tower consistent by construction. Jump thresholds are
// precomputed once so replicate loops stay cheap.
class VmcSampler {
public:
    VmcSampler(const VidPrefix& vid, const VtmPrefix& vtm, int level)
        : level_(level) {
        if (level < 0) throw std::invalid_argument("VmcSampler: negative level");
        if (vid.max_level() < level) throw std::invalid_argument("VmcSampler: VID shorter than level");
        initial_ = CategoricalSampler(vid.level(level).weights);
        const StochasticLevelMatrix& k = vtm.level(level);
        rows_.reserve(static_cast<std::size_t>(level) + 1);
        for (int a = 0; a <= level; ++a) rows_.emplace_back(k.rows[static_cast<std::size_t>(a)]);
    }

    int level() const { return level_; }

    LevelPath sample_top(int steps, RandomStream& rng) const {
        if (steps <= 0) throw std::invalid_argument("VmcSampler: need at least one step");
        std::vector<int> entries;
        entries.reserve(static_cast<std::size_t>(steps) + 1);
        int state = initial_.draw(rng);
        entries.push_back(state);
        for (int t = 0; t < steps; ++t) {
            state = rows_[static_cast<std::size_t>(state)].draw(rng);
            entries.push_back(state);
            if (state == 0) break;  // absorbed; the remaining slots are implied
        }
        return LevelPath(level_, std::move(entries), static_cast<std::size_t>(steps) + 1);
    }

    VirtualPathPrefix sample(int steps, RandomStream& rng) const {
        return tower_from_top(sample_top(steps, rng));
    }

private:
    int level_;
    CategoricalSampler initial_;
    std::vector<CategoricalSampler> rows_;
};

// Convenience one-shot: validates compatibility first, then samples.
inline VirtualPathPrefix sample_vmc(const VidPrefix& vid, const VtmPrefix& vtm, int level, int steps,
                                    std::uint64_t seed, std::uint64_t replicate = 0) {
    auto compat = validate_compatibility(vid, vtm);
    if (!compat.empty())
        throw std::invalid_argument("sample_vmc: VID incompatible with VTM at level " +
                                    std::to_string(compat.front().level));
    VmcSampler sampler(vid, vtm, level);
    RandomStream rng = RandomStream::derive(seed, replicate);
    return sampler.sample(steps, rng);
}

struct VisitCount {
    long count = 0;
    bool exact = false;  // true when absorption proves no further visits
};

// The staircase decomposition of one observed tower: initial states, and the
// state right after each k-th visit to each tracked a. nullopt marks entries
// the horizon cannot resolve; a determined 0 marks a visit that provably
// never happens.
struct DecompositionPrefix {
    int top_level = 0;
    int max_state = 0;
    int max_visit_index = 0;
    std::vector<std::optional<int>> s0;                              // by level
    std::map<std::pair<int, int>, std::vector<std::optional<int>>> sak;  // (a,k) -> by level
    std::map<int, VisitCount> visit_counts;                          // top-level counts
};

inline DecompositionPrefix staircase_decomposition(const VirtualPathPrefix& vp, int max_state,
                                                   int max_visit_index) {
    vp.validate_shape();
    DecompositionPrefix out;
    out.top_level = vp.top_level;
    out.max_state = max_state;
    out.max_visit_index = max_visit_index;

    for (int n = 0; n <= vp.top_level; ++n) out.s0.push_back(vp.level(n).entry_at(0));

    for (int a = 1; a <= max_state && a <= vp.top_level; ++a) {
        for (int k = 0; k <= max_visit_index; ++k) {
            std::vector<std::optional<int>> entries(static_cast<std::size_t>(vp.top_level) + 1);
            for (int n = a; n <= vp.top_level; ++n) {
                const LevelPath& path = vp.level(n);
                HitResult hit = hitting_index(path, {a}, static_cast<std::size_t>(k));
                switch (hit.kind) {
                    case HitResult::Kind::FoundAt:
                        entries[static_cast<std::size_t>(n)] = path.entry_at(hit.index + 1);
                        break;
                    case HitResult::Kind::ProvablyNever:
                        entries[static_cast<std::size_t>(n)] = 0;
                        break;
                    case HitResult::Kind::UnknownWithinHorizon:
                        break;
                }
            }
            out.sak.emplace(std::make_pair(a, k), std::move(entries));
        }
        const LevelPath& top = vp.level(vp.top_level);
        VisitCount vc;
        for (int s : top.entries)
            if (s == a) ++vc.count;
        vc.exact = top.absorbed();  // a >= 1 cannot be visited after absorption
        out.visit_counts[a] = vc;
    }
    return out;
}

// The law of the post-visit staircase, conditional on the visit happening.
// The visit index does not change the conditional law.
inline MarginalSequence extend_sak_law(const VtmPrefix& vtm, int a, int top_level) {
    return row_of_vtm(vtm, a, top_level);
}

enum class VisitVerdict { InfinitelyVisited, OnceVisited, NeverVisited, RandomlyVisited };

inline std::string to_string(VisitVerdict v) {
    switch (v) {
        case VisitVerdict::InfinitelyVisited: return "infinitely_visited";
        case VisitVerdict::OnceVisited: return "once_visited";
        case VisitVerdict::NeverVisited: return "never_visited";
        case VisitVerdict::RandomlyVisited: return "randomly_visited";
    }
    return "?";
}

struct StateClassification {
    int a = 0;
    Rational q;  // probability of ever visiting a
    Rational p;  // return probability after a visit
    VisitVerdict verdict = VisitVerdict::NeverVisited;
};

namespace detail {

inline VisitVerdict verdict_from(const Rational& q, const Rational& p) {
    if (q == 0) return VisitVerdict::NeverVisited;
    if (q == 1 && p == 1) return VisitVerdict::InfinitelyVisited;
    if (q == 1 && p == 0) return VisitVerdict::OnceVisited;
    return VisitVerdict::RandomlyVisited;
}

// Minimal hitting probabilities h(x) = P_x(reach `target`) for a finite
// chain: zero off the set that can reach the target, an exact linear solve on
// the rest.
inline std::vector<Rational> hit_probabilities(const StochasticLevelMatrix& k, int target) {
    const int n = k.level;
    std::vector<bool> can_reach(static_cast<std::size_t>(n) + 1, false);
    can_reach[static_cast<std::size_t>(target)] = true;
    bool grew = true;
    while (grew) {
        grew = false;
        for (int x = 0; x <= n; ++x) {
            if (can_reach[static_cast<std::size_t>(x)]) continue;
            for (int y = 0; y <= n; ++y)
                if (can_reach[static_cast<std::size_t>(y)] && k.at(x, y) > 0) {
                    can_reach[static_cast<std::size_t>(x)] = true;
                    grew = true;
                    break;
                }
        }
    }
    std::vector<int> transient;
    for (int x = 0; x <= n; ++x)
        if (x != target && can_reach[static_cast<std::size_t>(x)]) transient.push_back(x);

    std::vector<Rational> h(static_cast<std::size_t>(n) + 1, Rational(0));
    h[static_cast<std::size_t>(target)] = 1;
    if (transient.empty()) return h;

    const std::size_t m = transient.size();
    std::vector<std::vector<Rational>> a(m, std::vector<Rational>(m, Rational(0)));
    std::vector<Rational> b(m, Rational(0));
    for (std::size_t i = 0; i < m; ++i) {
        a[i][i] = 1;
        for (std::size_t j = 0; j < m; ++j) a[i][j] -= k.at(transient[i], transient[j]);
        b[i] = k.at(transient[i], target);
    }
    std::vector<Rational> solved = solve_linear_system(std::move(a), std::move(b));
    for (std::size_t i = 0; i < m; ++i) h[static_cast<std::size_t>(transient[i])] = solved[i];
    return h;
}

}  // namespace detail

// Exact classification of a state's visit behaviour from the level-a chain;
// nothing here depends on simulation.
inline StateClassification classify_state(const VidPrefix& vid, const VtmPrefix& vtm, int a) {
    if (a < 0) throw std::invalid_argument("classify_state: negative state");
    StateClassification out;
    out.a = a;
    if (a == 0) {
        // The level-0 chain sits at 0 forever.
        out.q = 1;
        out.p = 1;
        out.verdict = VisitVerdict::InfinitelyVisited;
        return out;
    }
    const StochasticLevelMatrix& k = vtm.level(a);
    const LevelDistribution& nu = vid.level(a);
    std::vector<Rational> h = detail::hit_probabilities(k, a);
    Rational q = 0;
    for (int x = 0; x <= a; ++x) q += nu(x) * h[static_cast<std::size_t>(x)];
    Rational p = 0;
    for (int b = 0; b <= a; ++b) p += k.at(a, b) * h[static_cast<std::size_t>(b)];
    out.q = std::move(q);
    out.p = std::move(p);
    out.verdict = detail::verdict_from(out.q, out.p);
    return out;
}

struct IrreducibilityReport {
    std::vector<bool> per_level;  // index N: {1..N} is a single communicating class of K_N
    bool overall = true;
};

namespace detail {

inline std::vector<bool> reachable_in_positive_part(const StochasticLevelMatrix& k, int from) {
    const int n = k.level;
    std::vector<bool> seen(static_cast<std::size_t>(n) + 1, false);
    std::vector<int> stack{from};
    seen[static_cast<std::size_t>(from)] = true;
    while (!stack.empty()) {
        int x = stack.back();
        stack.pop_back();
        for (int y = 1; y <= n; ++y)
            if (!seen[static_cast<std::size_t>(y)] && k.at(x, y) > 0) {
                seen[static_cast<std::size_t>(y)] = true;
                stack.push_back(y);
            }
    }
    return seen;
}

}  // namespace detail

// Strong connectivity of the positive digraph on {1..N}, per level. Walks
// through 0 cannot continue, so the induced subgraph is the right object.
inline bool irreducible_level(const StochasticLevelMatrix& k) {
    if (k.level < 1) return true;
    std::vector<bool> from_one = detail::reachable_in_positive_part(k, 1);
    for (int y = 1; y <= k.level; ++y)
        if (!from_one[static_cast<std::size_t>(y)]) return false;
    for (int x = 2; x <= k.level; ++x)
        if (!detail::reachable_in_positive_part(k, x)[1]) return false;
    return true;
}

// No mass leaks from {1..N} to the absorbing state.
inline bool closed_level(const StochasticLevelMatrix& k) {
    for (int x = 1; x <= k.level; ++x)
        if (k.at(x, 0) > 0) return false;
    return true;
}

inline IrreducibilityReport irreducible(const VtmPrefix& vtm, int through_level) {
    IrreducibilityReport out;
    for (int n = 0; n <= through_level; ++n) {
        bool ok = irreducible_level(vtm.level(n));
        out.per_level.push_back(ok);
        out.overall = out.overall && ok;
    }
    return out;
}

}  // namespace vmc
