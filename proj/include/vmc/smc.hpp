#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "vmc/balayage.hpp"
#include "vmc/distribution.hpp"
#include "vmc/errors.hpp"
#include "vmc/marginal.hpp"
#include "vmc/rng.hpp"

namespace vmc {

// A staircase path: s_N lives in {0,...,N} and each step either holds or
// jumps to the new top state.
struct StaircasePrefix {
    std::vector<int> states;  // s_0 .. s_L

    int top_level() const { return static_cast<int>(states.size()) - 1; }
    int at(int n) const { return states.at(static_cast<std::size_t>(n)); }

    void validate() const {
        if (states.empty()) throw std::invalid_argument("StaircasePrefix: empty");
        for (std::size_t n = 0; n < states.size(); ++n) {
            if (states[n] < 0 || states[n] > static_cast<int>(n))
                throw std::invalid_argument("StaircasePrefix: state out of range at level " + std::to_string(n));
            if (n > 0 && states[n] != states[n - 1] && states[n] != static_cast<int>(n))
                throw std::invalid_argument("StaircasePrefix: neither hold nor jump at level " + std::to_string(n));
        }
    }

    bool operator<(const StaircasePrefix& o) const { return states < o.states; }
    bool operator==(const StaircasePrefix& o) const { return states == o.states; }
};

// The hold/jump chain whose level marginals are a prescribed sequence.
// hold(N, s) = nu_{N+1}(s) / nu_N(s); the complementary mass jumps to N+1.
class SmcKernel {
public:
    explicit SmcKernel(MarginalSequence marginals) : marginals_(std::move(marginals)) {
        if (marginals_.levels.empty()) throw std::invalid_argument("SmcKernel: no marginals");
        for (std::size_t n = 0; n < marginals_.levels.size(); ++n) {
            if (marginals_.levels[n].level != static_cast<int>(n))
                throw std::invalid_argument("SmcKernel: marginal level mismatch");
            marginals_.levels[n].validate("SmcKernel marginal " + std::to_string(n));
        }
        for (int n = 0; n + 1 <= marginals_.top_level(); ++n)
            for (int a = 0; a <= n; ++a)
                if (marginals_.level(n + 1)(a) > marginals_.level(n)(a))
                    throw std::invalid_argument("SmcKernel: marginals not projectively monotone at level " +
                                                std::to_string(n));
    }

    const MarginalSequence& marginals() const { return marginals_; }
    int top_level() const { return marginals_.top_level(); }

    Rational hold_probability(int n, int state) const {
        const Rational& lower = marginals_.level(n)(state);
        if (lower == 0)
            throw InternalUnreachableState("SmcKernel: state " + std::to_string(state) +
                                           " has zero mass at level " + std::to_string(n));
        return marginals_.level(n + 1)(state) / lower;
    }

private:
    MarginalSequence marginals_;
};

inline StaircasePrefix sample_staircase(const SmcKernel& kernel, int top_level, RandomStream& rng) {
    if (top_level > kernel.top_level())
        throw std::invalid_argument("sample_staircase: kernel marginals too short");
    StaircasePrefix s;
    s.states.reserve(static_cast<std::size_t>(top_level) + 1);
    s.states.push_back(0);
    for (int n = 0; n < top_level; ++n) {
        int cur = s.states.back();
        bool hold = draw_bernoulli(kernel.hold_probability(n, cur), rng);
        s.states.push_back(hold ? cur : n + 1);
    }
    return s;
}

// Point marginals of a single staircase path; an extreme point of the
// marginal-sequence body.
inline MarginalSequence point_marginals(const StaircasePrefix& s) {
    s.validate();
    MarginalSequence m;
    for (int n = 0; n <= s.top_level(); ++n)
        m.levels.push_back(LevelDistribution::delta(n, s.at(n)));
    return m;
}

// Every positive-probability staircase prefix together with its exact
// probability under the kernel. At most 2^L paths.
inline std::vector<std::pair<StaircasePrefix, Rational>> enumerate_staircases(const SmcKernel& kernel,
                                                                              int top_level) {
    std::vector<std::pair<StaircasePrefix, Rational>> done;
    std::vector<std::pair<std::vector<int>, Rational>> frontier{{{0}, Rational(1)}};
    for (int n = 0; n < top_level; ++n) {
        std::vector<std::pair<std::vector<int>, Rational>> next;
        for (auto& [states, prob] : frontier) {
            Rational hold = kernel.hold_probability(n, states.back());
            if (hold > 0) {
                auto held = states;
                held.push_back(states.back());
                next.emplace_back(std::move(held), prob * hold);
            }
            if (hold < 1) {
                auto jumped = states;
                jumped.push_back(n + 1);
                next.emplace_back(std::move(jumped), prob * (1 - hold));
            }
        }
        frontier = std::move(next);
    }
    done.reserve(frontier.size());
    for (auto& [states, prob] : frontier) done.push_back({StaircasePrefix{std::move(states)}, prob});
    return done;
}

struct EmpiricalMarginals {
    std::vector<std::vector<long>> counts;  // counts[n][state]
    long replicates = 0;
    std::vector<Rational> tv;  // per level, against the reference

    Rational max_tv() const {
        Rational m = 0;
        for (const Rational& t : tv)
            if (t > m) m = t;
        return m;
    }
};

// Per-level empirical frequencies of a uniform-length sample set and their
// exact total-variation distances from a reference sequence.
inline EmpiricalMarginals empirical_marginals(const std::vector<StaircasePrefix>& samples,
                                              const MarginalSequence& reference) {
    if (samples.empty()) throw std::invalid_argument("empirical_marginals: no samples");
    const int top = samples.front().top_level();
    if (reference.top_level() < top) throw std::invalid_argument("empirical_marginals: reference too short");
    EmpiricalMarginals out;
    out.replicates = static_cast<long>(samples.size());
    out.counts.resize(static_cast<std::size_t>(top) + 1);
    for (int n = 0; n <= top; ++n) out.counts[static_cast<std::size_t>(n)].assign(static_cast<std::size_t>(n) + 1, 0);
    for (const StaircasePrefix& s : samples) {
        if (s.top_level() != top) throw std::invalid_argument("empirical_marginals: ragged sample lengths");
        for (int n = 0; n <= top; ++n) ++out.counts[static_cast<std::size_t>(n)][static_cast<std::size_t>(s.at(n))];
    }
    for (int n = 0; n <= top; ++n) {
        LevelDistribution emp;
        emp.level = n;
        for (long c : out.counts[static_cast<std::size_t>(n)]) emp.weights.push_back(ratio(c, out.replicates));
        out.tv.push_back(tv_distance(emp, reference.level(n)));
    }
    return out;
}

struct BackwardCheck {
    int level = 0;                 // conditional of S_level given a jump at level+1
    long conditioning_count = 0;
    std::vector<long> counts;      // counts[state]
    Rational tv;                   // against pi_level
};

// Empirical backward transition at one level: the conditional law of S_N on
// the event that the next step jumped.
inline BackwardCheck backward_check(const std::vector<StaircasePrefix>& samples, const Balayage& pi, int level) {
    BackwardCheck out;
    out.level = level;
    out.counts.assign(static_cast<std::size_t>(level) + 1, 0);
    for (const StaircasePrefix& s : samples) {
        if (s.top_level() < level + 1) throw std::invalid_argument("backward_check: samples too short");
        if (s.at(level + 1) == level + 1) {
            ++out.conditioning_count;
            ++out.counts[static_cast<std::size_t>(s.at(level))];
        }
    }
    if (out.conditioning_count == 0)
        throw ConditioningEventUnobserved("backward_check: no jump observed at level " + std::to_string(level + 1));
    LevelDistribution emp;
    emp.level = level;
    for (long c : out.counts) emp.weights.push_back(ratio(c, out.conditioning_count));
    out.tv = tv_distance(emp, pi.row(level));
    return out;
}

}  // namespace vmc
