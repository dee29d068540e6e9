#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "vmc/rational.hpp"

namespace vmc {

// Exact probability vector on the state space {0, 1, ..., level}.
struct LevelDistribution {
    int level = 0;
    std::vector<Rational> weights;  // size level + 1

    LevelDistribution() : weights{Rational(1)} {}
    LevelDistribution(int lvl, std::vector<Rational> w) : level(lvl), weights(std::move(w)) {}

    static LevelDistribution delta(int level, int a) {
        LevelDistribution d;
        d.level = level;
        d.weights.assign(static_cast<std::size_t>(level) + 1, Rational(0));
        d.weights.at(static_cast<std::size_t>(a)) = 1;
        return d;
    }

    // Uniform on {1, ..., level}; state 0 carries no mass. Needs level >= 1.
    static LevelDistribution uniform_positive(int level) {
        if (level < 1) throw std::invalid_argument("uniform_positive: level must be >= 1");
        LevelDistribution d;
        d.level = level;
        d.weights.assign(static_cast<std::size_t>(level) + 1, ratio(1, level));
        d.weights[0] = 0;
        return d;
    }

    const Rational& operator()(int a) const { return weights.at(static_cast<std::size_t>(a)); }

    bool operator==(const LevelDistribution& o) const {
        return level == o.level && weights == o.weights;
    }
    bool operator!=(const LevelDistribution& o) const { return !(*this == o); }

    void validate(const std::string& context = "distribution") const {
        if (weights.size() != static_cast<std::size_t>(level) + 1)
            throw std::invalid_argument(context + ": weight count does not match level");
        Rational sum = 0;
        for (const Rational& w : weights) {
            if (w < 0) throw std::invalid_argument(context + ": negative weight");
            sum += w;
        }
        if (sum != 1) throw std::invalid_argument(context + ": weights sum to " + to_fraction_string(sum));
    }
};

inline Rational tv_distance(const LevelDistribution& a, const LevelDistribution& b) {
    if (a.level != b.level) throw std::invalid_argument("tv_distance: level mismatch");
    Rational total = 0;
    for (std::size_t i = 0; i < a.weights.size(); ++i) {
        Rational d = a.weights[i] - b.weights[i];
        total += d < 0 ? -d : d;
    }
    return total / 2;
}

// The projective order: upper sits one level above lower and loses mass
// pointwise on the shared states.
inline bool projectively_below(const LevelDistribution& upper, const LevelDistribution& lower) {
    if (upper.level != lower.level + 1) throw std::invalid_argument("projectively_below: levels not adjacent");
    for (int a = 0; a <= lower.level; ++a)
        if (upper(a) > lower(a)) return false;
    return true;
}

}  // namespace vmc
