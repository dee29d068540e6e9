#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vmc/balayage.hpp"
#include "vmc/matrix.hpp"

namespace vmc {

// A virtual transition matrix, held as a per-level generator with a cache.
// Levels are produced on demand, validated on first access, and never mutated
// afterwards, so a prefix handle can be shared across threads.
class VtmPrefix {
public:
    using Generator = std::function<StochasticLevelMatrix(int)>;

    VtmPrefix() : VtmPrefix(std::vector<StochasticLevelMatrix>{trivial_level0()}) {}

    explicit VtmPrefix(Generator gen, int max_level = -1)
        : impl_(std::make_shared<Impl>()) {
        impl_->gen = std::move(gen);
        impl_->max_level = max_level;
    }

    explicit VtmPrefix(std::vector<StochasticLevelMatrix> levels)
        : impl_(std::make_shared<Impl>()) {
        if (levels.empty()) throw std::invalid_argument("VtmPrefix: no levels");
        impl_->max_level = static_cast<int>(levels.size()) - 1;
        impl_->cache.resize(levels.size());
        for (std::size_t n = 0; n < levels.size(); ++n) {
            if (levels[n].level != static_cast<int>(n))
                throw std::invalid_argument("VtmPrefix: level " + std::to_string(n) + " mislabeled");
            levels[n].validate("VtmPrefix level " + std::to_string(n));
            impl_->cache[n] = std::move(levels[n]);
        }
    }

    // -1 when a generator can produce arbitrarily high levels.
    int max_level() const { return impl_->max_level; }

    const StochasticLevelMatrix& level(int n) const {
        if (n < 0) throw std::out_of_range("VtmPrefix: negative level");
        if (impl_->max_level >= 0 && n > impl_->max_level)
            throw std::out_of_range("VtmPrefix: level " + std::to_string(n) + " beyond prefix");
        std::lock_guard<std::mutex> lock(impl_->mu);
        if (static_cast<std::size_t>(n) >= impl_->cache.size())
            impl_->cache.resize(static_cast<std::size_t>(n) + 1);
        auto& slot = impl_->cache[static_cast<std::size_t>(n)];
        if (!slot) {
            StochasticLevelMatrix m = impl_->gen(n);
            if (m.level != n) throw std::logic_error("VtmPrefix: generator produced wrong level");
            m.validate("VtmPrefix level " + std::to_string(n));
            slot = std::move(m);
        }
        return *slot;
    }

private:
    static StochasticLevelMatrix trivial_level0() {
        StochasticLevelMatrix m;
        m.level = 0;
        m.rows = {{Rational(1)}};
        return m;
    }

    struct Impl {
        Generator gen;
        int max_level = -1;
        mutable std::mutex mu;
        mutable std::vector<std::optional<StochasticLevelMatrix>> cache;
    };
    std::shared_ptr<Impl> impl_;
};

struct VtmProjectivityViolation {
    int level = 0;  // project(K_{level+1}) != K_level, first differing entry
    int row = 0;
    int col = 0;
};

// Exact check that each level is the projection of the one above.
inline std::vector<VtmProjectivityViolation> validate_vtm(const VtmPrefix& vtm, int through_level) {
    std::vector<VtmProjectivityViolation> report;
    for (int n = 0; n + 1 <= through_level; ++n) {
        StochasticLevelMatrix projected = project_matrix(vtm.level(n + 1));
        const StochasticLevelMatrix& stored = vtm.level(n);
        bool hit = false;
        for (int a = 0; a <= n && !hit; ++a)
            for (int b = 0; b <= n && !hit; ++b)
                if (projected.at(a, b) != stored.at(a, b)) {
                    report.push_back({n, a, b});
                    hit = true;
                }
    }
    return report;
}

// The balayage rows 0..L-1 read off a VTM prefix valid through level L.
inline Balayage balayage_of_vtm(const VtmPrefix& vtm, int length) {
    Balayage pi;
    for (int n = 0; n < length; ++n) pi.rows.push_back(balayage_row(vtm.level(n + 1)));
    return pi;
}

}  // namespace vmc
