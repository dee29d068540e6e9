#pragma once

#include <cstddef>
#include <vector>

#include "vmc/errors.hpp"
#include "vmc/rational.hpp"

namespace vmc {

// Exact Gaussian elimination; A is consumed. Throws SingularSystem when the
// matrix has no inverse (which the callers treat as an internal invariant
// failure, not a user error).
inline std::vector<Rational> solve_linear_system(std::vector<std::vector<Rational>> a,
                                                 std::vector<Rational> b) {
    const std::size_t n = a.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && a[pivot][col] == 0) ++pivot;
        if (pivot == n) throw SingularSystem("solve_linear_system: singular matrix");
        std::swap(a[pivot], a[col]);
        std::swap(b[pivot], b[col]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || a[r][col] == 0) continue;
            Rational f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<Rational> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return x;
}

}  // namespace vmc
