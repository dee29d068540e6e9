#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "vmc/balayage.hpp"
#include "vmc/distribution.hpp"
#include "vmc/marginal.hpp"

namespace vmc {

// Law of the first state in {0,...,N} reached by a particle that starts at a
// and repeatedly steps down along the balayage rows. Entries double as the
// representing matrix of the simplex cut out by the balayage. Computed by the
// sum recursion over the previous row; the backward level recursion inside
// delta_point is the independent second route to the same values.
class ExtendedBalayageTable {
public:
    explicit ExtendedBalayageTable(Balayage pi, int a_max = 256)
        : pi_(std::move(pi)), a_max_(a_max) {}

    const Balayage& balayage() const { return pi_; }
    int a_max() const { return a_max_; }

    const LevelDistribution& at(int a, int level) {
        if (a < 0 || level < 0) throw std::invalid_argument("ExtendedBalayageTable: negative index");
        if (a > a_max_)
            throw std::invalid_argument("ExtendedBalayageTable: a=" + std::to_string(a) +
                                        " exceeds configured bound " + std::to_string(a_max_));
        auto& column = columns_[level];
        if (a <= level) {
            ensure_base(column, level, a);
            return column[static_cast<std::size_t>(a)];
        }
        ensure_base(column, level, level);
        for (int b = static_cast<int>(column.size()); b <= a; ++b) {
            const LevelDistribution& prev = pi_.row(b - 1);
            LevelDistribution next;
            next.level = level;
            next.weights.assign(static_cast<std::size_t>(level) + 1, Rational(0));
            for (int j = 0; j < b; ++j) {
                const Rational& w = prev(j);
                if (w == 0) continue;
                if (j <= level) {
                    next.weights[static_cast<std::size_t>(j)] += w;
                } else {
                    const LevelDistribution& sub = column[static_cast<std::size_t>(j)];
                    for (int s = 0; s <= level; ++s)
                        next.weights[static_cast<std::size_t>(s)] += w * sub(s);
                }
            }
            column.push_back(std::move(next));
        }
        return column[static_cast<std::size_t>(a)];
    }

private:
    static void ensure_base(std::vector<LevelDistribution>& column, int level, int up_to) {
        for (int b = static_cast<int>(column.size()); b <= up_to && b <= level; ++b)
            column.push_back(LevelDistribution::delta(level, b));
    }

    Balayage pi_;
    int a_max_;
    std::map<int, std::vector<LevelDistribution>> columns_;  // level -> (b -> pi_{b,level})
};

inline LevelDistribution extended_balayage(const Balayage& pi, int a, int level, int a_max = 256) {
    ExtendedBalayageTable table(pi, a_max);
    return table.at(a, level);
}

// g_a = sum_b weights(b) * pi_{a,level}(b), for every a up to a_hi, without
// materializing any distribution: the scalar form of the sum recursion.
inline std::vector<Rational> backward_hit_expectation(const Balayage& pi, int level,
                                                      const std::vector<Rational>& weights, int a_hi) {
    if (static_cast<int>(weights.size()) != level + 1)
        throw std::invalid_argument("backward_hit_expectation: weight vector must cover 0..level");
    std::vector<Rational> g(static_cast<std::size_t>(a_hi) + 1, Rational(0));
    for (int a = 0; a <= std::min(level, a_hi); ++a) g[static_cast<std::size_t>(a)] = weights[static_cast<std::size_t>(a)];
    for (int a = level + 1; a <= a_hi; ++a) {
        const LevelDistribution& prev = pi.row(a - 1);
        Rational acc = 0;
        for (int j = 0; j < a; ++j) {
            const Rational& w = prev(j);
            if (w == 0) continue;
            acc += w * (j <= level ? weights[static_cast<std::size_t>(j)] : g[static_cast<std::size_t>(j)]);
        }
        g[static_cast<std::size_t>(a)] = acc;
    }
    return g;
}

// pi_{b,level}(state) as b runs 0..b_hi.
inline std::vector<Rational> extended_coordinate_column(const Balayage& pi, int level, int state, int b_hi) {
    std::vector<Rational> indicator(static_cast<std::size_t>(level) + 1, Rational(0));
    indicator.at(static_cast<std::size_t>(state)) = 1;
    return backward_hit_expectation(pi, level, indicator, b_hi);
}

struct SternfeldRow {
    int a = 0;
    Rational sum;      // sum_b (pi_{b,M}(c))^2 * pi_{a,N}(b)
    Rational target;   // (pi_{a,M}(c))^2
    Rational abs_dev;
};

struct SternfeldStatistic {
    int m_level = 0;
    int state = 0;
    int n_level = 0;
    std::vector<SternfeldRow> rows;
    Rational sup_abs_dev;
};

// Second-moment compactness statistic for one (M, c, N) cell over a range of
// start states. Caches the (M, c) coordinate column so a caller sweeping N
// pays for it once.
class SternfeldScan {
public:
    SternfeldScan(Balayage pi, int m_level, int state)
        : pi_(std::move(pi)), m_level_(m_level), state_(state) {
        if (state_ < 0 || state_ > m_level_) throw std::invalid_argument("SternfeldScan: state outside 0..M");
    }

    SternfeldStatistic at(int n_level, int a_lo, int a_hi) {
        if (!(m_level_ <= n_level && n_level <= a_lo && a_lo <= a_hi))
            throw std::invalid_argument("SternfeldScan: need M <= N <= a_lo <= a_hi");
        ensure_column(a_hi);
        std::vector<Rational> squared(static_cast<std::size_t>(n_level) + 1);
        for (int b = 0; b <= n_level; ++b)
            squared[static_cast<std::size_t>(b)] = column_[static_cast<std::size_t>(b)] * column_[static_cast<std::size_t>(b)];
        std::vector<Rational> sums = backward_hit_expectation(pi_, n_level, squared, a_hi);

        SternfeldStatistic out;
        out.m_level = m_level_;
        out.state = state_;
        out.n_level = n_level;
        out.sup_abs_dev = 0;
        for (int a = a_lo; a <= a_hi; ++a) {
            SternfeldRow row;
            row.a = a;
            row.sum = sums[static_cast<std::size_t>(a)];
            const Rational& h = column_[static_cast<std::size_t>(a)];
            row.target = h * h;
            Rational d = row.sum - row.target;
            row.abs_dev = d < 0 ? -d : d;
            if (row.abs_dev > out.sup_abs_dev) out.sup_abs_dev = row.abs_dev;
            out.rows.push_back(std::move(row));
        }
        return out;
    }

private:
    void ensure_column(int b_hi) {
        if (static_cast<int>(column_.size()) > b_hi) return;
        column_ = extended_coordinate_column(pi_, m_level_, state_, b_hi);
    }

    Balayage pi_;
    int m_level_;
    int state_;
    std::vector<Rational> column_;
};

inline SternfeldStatistic sternfeld_statistic(const Balayage& pi, int m_level, int state, int n_level,
                                              int a_lo, int a_hi) {
    return SternfeldScan(pi, m_level, state).at(n_level, a_lo, a_hi);
}

// pi_{a,N}(N) for a in [a_lo, a_hi]; its convergence in a is the singleton
// boundary diagnostic.
inline std::vector<Rational> k0_sequence(const Balayage& pi, int n_level, int a_lo, int a_hi) {
    if (a_lo < 0 || a_lo > a_hi) throw std::invalid_argument("k0_sequence: bad state range");
    std::vector<Rational> g = backward_hit_expectation(
        pi, n_level,
        [n_level] {
            std::vector<Rational> ind(static_cast<std::size_t>(n_level) + 1, Rational(0));
            ind.back() = 1;
            return ind;
        }(),
        a_hi);
    return {g.begin() + a_lo, g.begin() + a_hi + 1};
}

struct LimitScanGroup {
    std::vector<LevelDistribution> prefix;  // levels 0..truncation
    std::vector<int> members;
    bool tail_candidate = false;
};

struct LimitScanResult {
    int truncation_level = 0;
    int a_lo = 0, a_hi = 0;
    std::vector<LimitScanGroup> groups;

    std::vector<const LimitScanGroup*> candidates() const {
        std::vector<const LimitScanGroup*> out;
        for (const auto& g : groups)
            if (g.tail_candidate) out.push_back(&g);
        return out;
    }
};

// Clusters the truncated delta points over a range of start states. Groups
// still being produced near the top of the range are the finite-horizon
// candidates for subsequential limits; the scan certifies nothing beyond the
// stated truncation.
inline LimitScanResult limit_scan(const Balayage& pi, int truncation_level, int a_lo, int a_hi) {
    if (a_lo > a_hi) throw std::invalid_argument("limit_scan: empty range");
    LimitScanResult out;
    out.truncation_level = truncation_level;
    out.a_lo = a_lo;
    out.a_hi = a_hi;
    for (int a = a_lo; a <= a_hi; ++a) {
        std::vector<LevelDistribution> prefix = delta_point(pi, a, truncation_level).levels;
        bool placed = false;
        for (auto& g : out.groups)
            if (g.prefix == prefix) {
                g.members.push_back(a);
                placed = true;
                break;
            }
        if (!placed) out.groups.push_back({std::move(prefix), {a}, false});
    }
    const int window = std::max(2, (a_hi - a_lo + 1) / 4);
    for (auto& g : out.groups)
        g.tail_candidate = g.members.back() > a_hi - window;
    return out;
}

// N -> sum_b nu_N(b) * (pi_{b,M}(c))^2 for N = M..top. Nonincreasing in N for
// any member of the balayage's simplex; the drop to (nu_M(c))^2 is the tail
// second-moment defect.
inline std::vector<Rational> second_moment_profile(const MarginalSequence& nu, const Balayage& pi,
                                                   int m_level, int state) {
    const int top = nu.top_level();
    if (m_level > top) throw std::invalid_argument("second_moment_profile: M beyond prefix");
    std::vector<Rational> column = extended_coordinate_column(pi, m_level, state, top);
    std::vector<Rational> out;
    for (int n = m_level; n <= top; ++n) {
        Rational acc = 0;
        const LevelDistribution& d = nu.level(n);
        for (int b = 0; b <= n; ++b) {
            const Rational& w = d(b);
            if (w == 0) continue;
            acc += w * column[static_cast<std::size_t>(b)] * column[static_cast<std::size_t>(b)];
        }
        out.push_back(std::move(acc));
    }
    return out;
}

}  // namespace vmc
