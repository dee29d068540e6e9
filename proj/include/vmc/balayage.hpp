#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "vmc/distribution.hpp"

namespace vmc {

// Backward transition distributions: rows[N] is the law on {0,...,N} of where
// a particle at N+1 lands when it steps down.
struct Balayage {
    std::vector<LevelDistribution> rows;

    int max_level() const { return static_cast<int>(rows.size()) - 1; }

    const LevelDistribution& row(int n) const {
        if (n < 0 || n > max_level())
            throw std::out_of_range("Balayage: row " + std::to_string(n) + " not materialized");
        return rows[static_cast<std::size_t>(n)];
    }

    void validate() const {
        for (std::size_t n = 0; n < rows.size(); ++n) {
            if (rows[n].level != static_cast<int>(n))
                throw std::invalid_argument("Balayage: row " + std::to_string(n) + " has wrong level");
            rows[n].validate("Balayage row " + std::to_string(n));
        }
    }
};

// pi_N = delta_N: the particle always steps down exactly one state.
inline Balayage down_balayage(int max_level) {
    Balayage pi;
    for (int n = 0; n <= max_level; ++n) pi.rows.push_back(LevelDistribution::delta(n, n));
    return pi;
}

// pi_N = delta_{N-1} for N >= 1: the particle skips down two states at a time.
inline Balayage two_down_balayage(int max_level) {
    Balayage pi;
    pi.rows.push_back(LevelDistribution::delta(0, 0));
    for (int n = 1; n <= max_level; ++n) pi.rows.push_back(LevelDistribution::delta(n, n - 1));
    return pi;
}

// pi_N uniform on {1,...,N} for N >= 1.
inline Balayage uniform_balayage(int max_level) {
    Balayage pi;
    pi.rows.push_back(LevelDistribution::delta(0, 0));
    for (int n = 1; n <= max_level; ++n) pi.rows.push_back(LevelDistribution::uniform_positive(n));
    return pi;
}

}  // namespace vmc
