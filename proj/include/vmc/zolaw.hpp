#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vmc/catalog.hpp"
#include "vmc/errors.hpp"
#include "vmc/extended_balayage.hpp"
#include "vmc/marginal.hpp"
#include "vmc/vmcsim.hpp"

namespace vmc {

enum class ExtremalityStatus { Extreme, NotExtreme, Inconclusive };

inline std::string to_string(ExtremalityStatus s) {
    switch (s) {
        case ExtremalityStatus::Extreme: return "extreme";
        case ExtremalityStatus::NotExtreme: return "not_extreme";
        case ExtremalityStatus::Inconclusive: return "inconclusive";
    }
    return "?";
}

struct ConvexSplitCertificate {
    MarginalSequence left, right;  // distinct members of the simplex
    Rational alpha;                // subject = alpha*left + (1-alpha)*right
};

struct TrendPoint {
    int m_level = 0;
    int state = 0;
    int n_level = 0;
    Rational defect;  // second-moment excess over the level-M square
};

struct ExtremalityEvidence {
    enum class Method { DeltaMatch, LimitMatch, ConvexSplit, CatalogFact, SecondMomentTrend, None };

    ExtremalityStatus status = ExtremalityStatus::Inconclusive;
    Method method = Method::None;
    int delta_a = -1;
    std::string label;
    std::optional<ConvexSplitCertificate> split;
    int truncation_level = 0;
    int candidate_bound = 0;
    std::vector<TrendPoint> trend;
};

inline std::string to_string(ExtremalityEvidence::Method m) {
    using Method = ExtremalityEvidence::Method;
    switch (m) {
        case Method::DeltaMatch: return "delta_match";
        case Method::LimitMatch: return "limit_match";
        case Method::ConvexSplit: return "convex_split";
        case Method::CatalogFact: return "catalog_fact";
        case Method::SecondMomentTrend: return "second_moment_trend";
        case Method::None: return "none";
    }
    return "?";
}

struct ExtremalityOptions {
    int candidate_bound = 32;  // delta points 0..bound feed matching and splits
    std::optional<BalayageFacts> facts;
};

namespace detail {

inline bool all_rows_point_masses(const Balayage& pi) {
    for (const LevelDistribution& row : pi.rows)
        for (const Rational& w : row.weights)
            if (w != 0 && w != 1) return false;
    return true;
}

// Tries subject = alpha*left + (1-alpha)*right with alpha read off the first
// coordinate where the candidates differ, then verified everywhere.
inline std::optional<Rational> fit_convex_weight(const MarginalSequence& subject, const MarginalSequence& left,
                                                 const MarginalSequence& right, int top_level) {
    std::optional<Rational> alpha;
    for (int n = 0; n <= top_level && !alpha; ++n)
        for (int s = 0; s <= n; ++s) {
            Rational d = left.level(n)(s) - right.level(n)(s);
            if (d != 0) {
                alpha = (subject.level(n)(s) - right.level(n)(s)) / d;
                break;
            }
        }
    if (!alpha || *alpha <= 0 || *alpha >= 1) return std::nullopt;
    for (int n = 0; n <= top_level; ++n)
        for (int s = 0; s <= n; ++s)
            if (subject.level(n)(s) != *alpha * left.level(n)(s) + (1 - *alpha) * right.level(n)(s))
                return std::nullopt;
    return alpha;
}

}  // namespace detail

// Re-derives an Extreme/NotExtreme certificate from scratch; evidence that
// does not survive this is a bug in the engine, not a property of the input.
inline void verify_evidence(const MarginalSequence& subject, const Balayage& pi,
                            const ExtremalityEvidence& ev) {
    using Method = ExtremalityEvidence::Method;
    const int top = ev.truncation_level;
    if (ev.method == Method::DeltaMatch) {
        if (!subject.prefix_equal(delta_point(pi, ev.delta_a, top)))
            throw std::logic_error("verify_evidence: delta certificate does not re-derive");
    } else if (ev.method == Method::ConvexSplit) {
        if (!ev.split) throw std::logic_error("verify_evidence: split certificate missing");
        if (!membership(ev.split->left, pi) || !membership(ev.split->right, pi))
            throw std::logic_error("verify_evidence: split member not in the simplex");
        if (ev.split->left.prefix_equal(ev.split->right))
            throw std::logic_error("verify_evidence: split members coincide");
        for (int n = 0; n <= top; ++n)
            for (int s = 0; s <= n; ++s)
                if (subject.level(n)(s) != ev.split->alpha * ev.split->left.level(n)(s) +
                                               (1 - ev.split->alpha) * ev.split->right.level(n)(s))
                    throw std::logic_error("verify_evidence: split mixture does not reproduce subject");
    }
}

// Extremality of a marginal-sequence prefix in the simplex of its balayage.
// Certificates are exact at the stated truncation; a symbolic tag or catalog
// fact is what extends them past it. Inconclusive is a first-class outcome.
inline ExtremalityEvidence extremality(const MarginalSequence& subject, const Balayage& pi,
                                       const ExtremalityOptions& options = {}) {
    using Method = ExtremalityEvidence::Method;
    MembershipResult member = membership(subject, pi);
    if (!member)
        throw MembershipViolation("extremality: subject violates the balayage recursion at level " +
                                  std::to_string(member.level) + ", state " + std::to_string(member.state));

    const int top = subject.top_level();
    ExtremalityEvidence ev;
    ev.truncation_level = top;
    ev.candidate_bound = options.candidate_bound;

    // Point matches. A tagged subject may sit above the truncation; untagged
    // ones must exhibit their point mass inside the prefix to count.
    int delta_hi = std::min(options.candidate_bound, std::min(top, pi.max_level() + 1));
    std::vector<MarginalSequence> deltas;
    for (int a = 0; a <= delta_hi; ++a) deltas.push_back(delta_point(pi, a, top));
    if (subject.tag.kind == MarginalTag::Kind::DeltaPoint && subject.tag.a > delta_hi &&
        subject.tag.a <= pi.max_level() + 1) {
        if (subject.prefix_equal(delta_point(pi, subject.tag.a, top))) {
            ev.status = ExtremalityStatus::Extreme;
            ev.method = Method::DeltaMatch;
            ev.delta_a = subject.tag.a;
            verify_evidence(subject, pi, ev);
            return ev;
        }
    }
    for (int a = 0; a <= delta_hi; ++a) {
        if (subject.prefix_equal(deltas[static_cast<std::size_t>(a)])) {
            ev.status = ExtremalityStatus::Extreme;
            ev.method = Method::DeltaMatch;
            ev.delta_a = a;
            verify_evidence(subject, pi, ev);
            return ev;
        }
    }

    // Catalog limit forms carry their own extremality facts.
    std::vector<std::pair<std::string, MarginalSequence>> limit_prefixes;
    if (options.facts) {
        for (const LimitPointForm& form : options.facts->limits) {
            MarginalSequence lim = form.materialize(top);
            if (subject.prefix_equal(lim)) {
                ev.status = form.extreme ? ExtremalityStatus::Extreme : ExtremalityStatus::NotExtreme;
                ev.method = Method::CatalogFact;
                ev.label = form.label;
                return ev;
            }
            limit_prefixes.emplace_back(form.label, std::move(lim));
        }
    }

    // Scan-detected limit candidates; certifiable only when every balayage row
    // is a point mass (then the extreme set is compact at this truncation).
    if (!options.facts) {
        LimitScanResult scan = limit_scan(pi, top, 0, std::min(options.candidate_bound, pi.max_level() + 1));
        std::size_t index = 0;
        for (const LimitScanGroup* group : scan.candidates()) {
            MarginalSequence cand;
            cand.levels = group->prefix;
            bool is_delta = group->members.front() <= delta_hi;  // already handled above
            if (!is_delta && subject.prefix_equal(cand)) {
                ev.method = Method::LimitMatch;
                ev.label = "scan_candidate_" + std::to_string(index);
                if (detail::all_rows_point_masses(pi)) {
                    ev.status = ExtremalityStatus::Extreme;
                } else {
                    ev.status = ExtremalityStatus::Inconclusive;
                }
                return ev;
            }
            ++index;
        }
    }

    // Exact two-point convex splits over the candidate set.
    std::vector<const MarginalSequence*> candidates;
    for (const auto& d : deltas) candidates.push_back(&d);
    for (const auto& [label, lim] : limit_prefixes) {
        (void)label;
        candidates.push_back(&lim);
    }
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        for (std::size_t j = i + 1; j < candidates.size(); ++j) {
            if (candidates[i]->prefix_equal(*candidates[j])) continue;
            auto alpha = detail::fit_convex_weight(subject, *candidates[i], *candidates[j], top);
            if (alpha) {
                ev.status = ExtremalityStatus::NotExtreme;
                ev.method = Method::ConvexSplit;
                ev.split = ConvexSplitCertificate{*candidates[i], *candidates[j], *alpha};
                verify_evidence(subject, pi, ev);
                return ev;
            }
        }
    }

    // Nothing certified; attach the second-moment trend as diagnostics.
    ev.status = ExtremalityStatus::Inconclusive;
    ev.method = Method::SecondMomentTrend;
    for (int m = 1; m <= std::min(3, top); ++m) {
        for (int c = 0; c <= m; ++c) {
            std::vector<Rational> profile = second_moment_profile(subject, pi, m, c);
            Rational base = subject.level(m)(c) * subject.level(m)(c);
            for (std::size_t i = 0; i < profile.size(); ++i)
                ev.trend.push_back({m, c, m + static_cast<int>(i), profile[i] - base});
        }
    }
    return ev;
}

// Tail second-moment diagnostic for a membership-checked sequence: exact,
// nonincreasing in N, with limit zero necessary for extremality. It never
// certifies anything by itself.
struct TailSecondMomentCell {
    int m_level = 0;
    int state = 0;
    std::vector<std::pair<int, Rational>> defect_by_level;  // (N, defect)
};

inline std::vector<TailSecondMomentCell> tail_second_moment_report(
    const MarginalSequence& nu, const Balayage& pi, const std::vector<std::pair<int, int>>& grid) {
    MembershipResult member = membership(nu, pi);
    if (!member)
        throw MembershipViolation("tail_second_moment_report: subject outside the simplex at level " +
                                  std::to_string(member.level));
    std::vector<TailSecondMomentCell> out;
    for (const auto& [m, c] : grid) {
        TailSecondMomentCell cell;
        cell.m_level = m;
        cell.state = c;
        Rational base = nu.level(m)(c) * nu.level(m)(c);
        std::vector<Rational> profile = second_moment_profile(nu, pi, m, c);
        for (std::size_t i = 0; i < profile.size(); ++i)
            cell.defect_by_level.emplace_back(m + static_cast<int>(i), profile[i] - base);
        out.push_back(std::move(cell));
    }
    return out;
}

enum class TailVerdict { Trivial, NonTrivial, Inconclusive };

inline std::string to_string(TailVerdict v) {
    switch (v) {
        case TailVerdict::Trivial: return "trivial";
        case TailVerdict::NonTrivial: return "non_trivial";
        case TailVerdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

struct ZolawOptions {
    int a_max = 32;        // states checked exactly
    int level_depth = -1;  // prefix depth for extremality comparisons; default a_max + 4
    bool use_shortcut = true;
};

struct ZeroOneReport {
    TailVerdict verdict = TailVerdict::Inconclusive;
    ExtremalityEvidence vid_evidence;
    std::vector<StateClassification> classifications;      // a = 1..a_max
    std::map<int, ExtremalityEvidence> row_evidence;       // rows that needed a check
    std::vector<int> randomly_visited;                     // witnesses for condition (iii)
    bool classical_shortcircuit = false;
    bool tail_classification_certified = false;            // a > a_max classification known
    std::optional<RowTailFact> row_tail;
    std::vector<std::string> notes;
    int a_max = 0;
    int level_depth = 0;
};

namespace detail {

// Classical towers carry their whole sigma-algebra in the tail, so the tail is
// trivial exactly when the chain itself is deterministic.
inline bool classical_chain_deterministic(const ModelSpec& spec, const VidPrefix& vid) {
    const int top = static_cast<int>(spec.classical_matrix.size()) - 1;
    const LevelDistribution& nu = vid.level(std::min(top, vid.max_level()));
    int start = -1;
    for (int s = 0; s <= nu.level; ++s) {
        if (nu(s) == 1) start = s;
        else if (nu(s) != 0) return false;
    }
    if (start < 0) return false;
    if (start > top) return false;
    std::vector<bool> seen(static_cast<std::size_t>(top) + 1, false);
    std::vector<int> stack{start};
    seen[static_cast<std::size_t>(start)] = true;
    while (!stack.empty()) {
        int x = stack.back();
        stack.pop_back();
        int next = -1;
        for (int y = 0; y <= top; ++y) {
            const Rational& w = spec.classical_matrix[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
            if (w == 0) continue;
            if (w != 1) return false;
            next = y;
        }
        if (next >= 0 && !seen[static_cast<std::size_t>(next)]) {
            seen[static_cast<std::size_t>(next)] = true;
            stack.push_back(next);
        }
    }
    return true;
}

}  // namespace detail

// The zero-one law evaluation: tail triviality holds iff the VID is extreme,
// every infinitely- or once-visited state has an extreme row, and no state is
// randomly visited. Quantifiers over all states are truncated at a_max and
// completed by family facts where available; otherwise the verdict honestly
// degrades to Inconclusive.
inline ZeroOneReport evaluate(const ModelSpec& spec, const VtmPrefix& vtm, const MarginalSequence& vid_marginals,
                              const ZolawOptions& options = {}) {
    ZeroOneReport report;
    report.a_max = options.a_max;
    report.level_depth = options.level_depth > 0 ? options.level_depth : options.a_max + 4;
    const int depth = std::max(report.level_depth, vid_marginals.top_level());

    VidPrefix vid = vid_of_marginals(vid_marginals);
    if (vid.max_level() < options.a_max)
        throw std::invalid_argument("evaluate: VID prefix must reach a_max");
    auto compat = validate_compatibility(vid, vtm);
    if (!compat.empty())
        throw std::invalid_argument("evaluate: VID incompatible with VTM at level " +
                                    std::to_string(compat.front().level));

    if (spec.family == ModelSpec::Family::Classical) {
        report.classical_shortcircuit = true;
        bool deterministic = detail::classical_chain_deterministic(spec, vid);
        report.verdict = deterministic ? TailVerdict::Trivial : TailVerdict::NonTrivial;
        report.vid_evidence.method = ExtremalityEvidence::Method::CatalogFact;
        report.vid_evidence.label = "classical";
        report.notes.push_back("classical tower: tail equals the full sigma-algebra, verdict by determinism");
        return report;
    }

    ModelFacts facts = model_facts(spec);
    Balayage pi = balayage_of_vtm(vtm, depth);
    ExtremalityOptions ext;
    ext.candidate_bound = options.a_max;
    ext.facts = facts.balayage;

    // Classification, exact; the shortcut replaces the linear solve when the
    // level is one closed communicating class, where q = 1 - nu_a(0), p = 1.
    for (int a = 1; a <= options.a_max; ++a) {
        StateClassification cls;
        const StochasticLevelMatrix& k = vtm.level(a);
        if (options.use_shortcut && irreducible_level(k) && closed_level(k)) {
            cls.a = a;
            cls.q = 1 - vid.level(a)(0);
            cls.p = 1;
            cls.verdict = detail::verdict_from(cls.q, cls.p);
        } else {
            cls = classify_state(vid, vtm, a);
        }
        report.classifications.push_back(cls);
        if (cls.verdict == VisitVerdict::RandomlyVisited) report.randomly_visited.push_back(a);
    }

    // Tail classification for a > a_max from the family's structure: with all
    // levels closed and irreducible, the VID's mass at 0 is nonincreasing in
    // the level, so the checked prefix settles the tail.
    bool tail_all_never = false;
    bool tail_all_infinite = false;
    if (facts.all_levels_irreducible_closed) {
        const Rational& mass0 = vid.level(options.a_max)(0);
        if (mass0 == 0) {
            tail_all_infinite = true;
            report.tail_classification_certified = true;
        } else if (mass0 == 1) {
            tail_all_never = true;  // the whole sequence is the zero sequence
            report.tail_classification_certified = true;
        } else {
            // A state with partial mass at 0 inside the prefix is already a
            // randomly-visited witness; reaching here means a_max itself is.
            report.tail_classification_certified = true;
        }
    }

    // Condition (ii) on the checked range.
    bool any_row_not_extreme = false;
    bool any_row_inconclusive = false;
    for (const StateClassification& cls : report.classifications) {
        if (cls.verdict != VisitVerdict::InfinitelyVisited && cls.verdict != VisitVerdict::OnceVisited) continue;
        MarginalSequence row = row_of_vtm(vtm, cls.a, depth);
        ExtremalityEvidence ev = extremality(row, pi, ext);
        if (ev.status == ExtremalityStatus::NotExtreme) any_row_not_extreme = true;
        if (ev.status == ExtremalityStatus::Inconclusive) any_row_inconclusive = true;
        report.row_evidence.emplace(cls.a, std::move(ev));
    }

    // Condition (ii) past the checked range.
    report.row_tail = facts.row_tail;
    bool tail_rows_certified_extreme = false;
    bool tail_rows_certified_not_extreme = false;
    if (tail_all_never) {
        tail_rows_certified_extreme = true;  // vacuous: nothing past a_max is visited
    } else if (report.tail_classification_certified && facts.row_tail &&
               facts.row_tail->from_a <= options.a_max + 1) {
        if (facts.row_tail->all_extreme) tail_rows_certified_extreme = true;
        else if (tail_all_infinite) tail_rows_certified_not_extreme = true;
    }

    // Condition (i).
    report.vid_evidence = extremality(vid_marginals, pi, ext);

    bool violated = !report.randomly_visited.empty() || any_row_not_extreme ||
                    report.vid_evidence.status == ExtremalityStatus::NotExtreme ||
                    tail_rows_certified_not_extreme;
    bool all_certified = report.randomly_visited.empty() && !any_row_inconclusive &&
                         report.vid_evidence.status == ExtremalityStatus::Extreme &&
                         report.tail_classification_certified && !any_row_not_extreme &&
                         tail_rows_certified_extreme;
    if (violated)
        report.verdict = TailVerdict::NonTrivial;
    else if (all_certified)
        report.verdict = TailVerdict::Trivial;
    else {
        report.verdict = TailVerdict::Inconclusive;
        if (!report.tail_classification_certified)
            report.notes.push_back("state classification beyond a_max not certified for this model");
        if (!tail_rows_certified_extreme)
            report.notes.push_back("row extremality beyond a_max not certified for this model");
    }
    return report;
}

}  // namespace vmc
