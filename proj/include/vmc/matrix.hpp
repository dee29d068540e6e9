#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "vmc/distribution.hpp"
#include "vmc/rational.hpp"

namespace vmc {

// Row-stochastic transition matrix on {0, ..., level} with 0 absorbing.
struct StochasticLevelMatrix {
    int level = 0;
    std::vector<std::vector<Rational>> rows;  // (level+1) x (level+1)

    const Rational& at(int a, int b) const {
        return rows.at(static_cast<std::size_t>(a)).at(static_cast<std::size_t>(b));
    }

    bool operator==(const StochasticLevelMatrix& o) const {
        return level == o.level && rows == o.rows;
    }

    void validate(const std::string& context = "matrix") const {
        const auto n = static_cast<std::size_t>(level) + 1;
        if (rows.size() != n)
            throw std::invalid_argument(context + ": row count does not match level");
        for (std::size_t a = 0; a < n; ++a) {
            if (rows[a].size() != n)
                throw std::invalid_argument(context + ": row " + std::to_string(a) + " has wrong width");
            Rational sum = 0;
            for (const Rational& w : rows[a]) {
                if (w < 0) throw std::invalid_argument(context + ": negative entry in row " + std::to_string(a));
                sum += w;
            }
            if (sum != 1)
                throw std::invalid_argument(context + ": row " + std::to_string(a) + " sums to " +
                                            to_fraction_string(sum));
        }
        if (rows[0][0] != 1)
            throw std::invalid_argument(context + ": state 0 must be absorbing");
    }
};

// Where a particle started at level+1 first lands in {0,...,level} when it
// moves by the matrix's own last row; mass trapped on the diagonal goes to 0.
inline LevelDistribution balayage_row(const StochasticLevelMatrix& upper) {
    const int n = upper.level;  // produces a distribution at level n-1
    if (n < 1) throw std::invalid_argument("balayage_row: need level >= 1");
    LevelDistribution pi;
    pi.level = n - 1;
    pi.weights.assign(static_cast<std::size_t>(n), Rational(0));
    const Rational& p = upper.at(n, n);
    if (p == 1) {
        pi.weights[0] = 1;
        return pi;
    }
    Rational escape = 1 - p;
    for (int b = 0; b < n; ++b) pi.weights[static_cast<std::size_t>(b)] = upper.at(n, b) / escape;
    return pi;
}

// One-step projection of a transition matrix: the last state is deleted and
// its mass is redistributed along where a particle parked there would first
// re-enter the remaining states.
inline StochasticLevelMatrix project_matrix(const StochasticLevelMatrix& upper) {
    upper.validate("project_matrix input");
    if (upper.level < 1) throw std::invalid_argument("project_matrix: nothing below level 0");
    const int n = upper.level;
    LevelDistribution pi = balayage_row(upper);
    StochasticLevelMatrix out;
    out.level = n - 1;
    out.rows.assign(static_cast<std::size_t>(n), std::vector<Rational>(static_cast<std::size_t>(n), Rational(0)));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            out.rows[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
                upper.at(a, b) + upper.at(a, n) * pi(b);
    return out;
}

}  // namespace vmc
