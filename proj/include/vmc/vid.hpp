#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "vmc/balayage.hpp"
#include "vmc/distribution.hpp"
#include "vmc/vtm.hpp"

namespace vmc {

// Virtual initial distribution prefix: one exact distribution per level,
// losing mass pointwise as the level grows.
struct VidPrefix {
    std::vector<LevelDistribution> levels;

    int max_level() const { return static_cast<int>(levels.size()) - 1; }

    const LevelDistribution& level(int n) const {
        if (n < 0 || n > max_level())
            throw std::out_of_range("VidPrefix: level " + std::to_string(n) + " not available");
        return levels[static_cast<std::size_t>(n)];
    }
};

struct VidMonotonicityViolation {
    int level = 0;  // nu_level(state) < nu_{level+1}(state)
    int state = 0;
};

inline std::vector<VidMonotonicityViolation> validate_vid(const VidPrefix& vid) {
    std::vector<VidMonotonicityViolation> report;
    for (std::size_t n = 0; n < vid.levels.size(); ++n) {
        if (vid.levels[n].level != static_cast<int>(n))
            throw std::invalid_argument("VidPrefix: level " + std::to_string(n) + " mislabeled");
        vid.levels[n].validate("VID level " + std::to_string(n));
    }
    for (int n = 0; n + 1 <= vid.max_level(); ++n) {
        for (int a = 0; a <= n; ++a) {
            if (vid.level(n + 1)(a) > vid.level(n)(a)) {
                report.push_back({n, a});
                break;
            }
        }
    }
    return report;
}

struct CompatibilityViolation {
    int level = 0;  // nu_level != nu_{level+1} + nu_{level+1}(level+1) * pi_level, at `state`
    int state = 0;
};

// Exact check of the one-step consistency between a VID and a VTM's balayage.
inline std::vector<CompatibilityViolation> validate_compatibility(const VidPrefix& vid, const VtmPrefix& vtm) {
    std::vector<CompatibilityViolation> report;
    for (int n = 0; n + 1 <= vid.max_level(); ++n) {
        LevelDistribution pi = balayage_row(vtm.level(n + 1));
        const LevelDistribution& lower = vid.level(n);
        const LevelDistribution& upper = vid.level(n + 1);
        const Rational& jump_mass = upper(n + 1);
        for (int a = 0; a <= n; ++a) {
            if (lower(a) != upper(a) + jump_mass * pi(a)) {
                report.push_back({n, a});
                break;
            }
        }
    }
    return report;
}

}  // namespace vmc
