#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace vmc {

// Finite prefix of a level-N sample path. `entries` holds the determined
// prefix; `horizon` counts the total observed slots, so horizon - entries.size()
// trailing slots are undetermined. State 0 is absorbing: once a determined 0
// appears the path is determined (and zero) at every later index, including
// indices beyond the stored horizon.
struct LevelPath {
    int level = 0;
    std::vector<int> entries;
    std::size_t horizon = 0;

    LevelPath() = default;
    LevelPath(int lvl, std::vector<int> determined, std::size_t total_slots)
        : level(lvl), entries(std::move(determined)), horizon(total_slots) {
        if (horizon < entries.size()) horizon = entries.size();
        validate();
    }
    LevelPath(int lvl, std::vector<int> determined)
        : LevelPath(lvl, std::move(determined), 0) {}

    std::size_t determined_len() const { return entries.size(); }

    bool absorbed() const { return !entries.empty() && entries.back() == 0; }

    // Index of the first determined 0, i.e. where absorption is first visible.
    std::size_t absorption_index() const {
        for (std::size_t i = 0; i < entries.size(); ++i)
            if (entries[i] == 0) return i;
        return entries.size();
    }

    // nullopt means the entry is not determined by this prefix.
    std::optional<int> entry_at(std::size_t i) const {
        if (i < entries.size()) return entries[i];
        if (absorbed()) return 0;
        return std::nullopt;
    }

    void validate() const {
        bool seen_zero = false;
        for (int s : entries) {
            if (s < 0 || s > level)
                throw std::invalid_argument("LevelPath: state " + std::to_string(s) +
                                            " outside level " + std::to_string(level));
            if (seen_zero && s != 0)
                throw std::invalid_argument("LevelPath: nonzero entry after absorption at 0");
            if (s == 0) seen_zero = true;
        }
    }
};

struct HitResult {
    enum class Kind { FoundAt, ProvablyNever, UnknownWithinHorizon };
    Kind kind = Kind::UnknownWithinHorizon;
    std::size_t index = 0;

    static HitResult found(std::size_t i) { return {Kind::FoundAt, i}; }
    static HitResult never() { return {Kind::ProvablyNever, 0}; }
    static HitResult unknown() { return {Kind::UnknownWithinHorizon, 0}; }

    bool operator==(const HitResult& o) const {
        return kind == o.kind && (kind != Kind::FoundAt || index == o.index);
    }
};

// Index of the (k+1)-th visit to targetSet, three-valued over the horizon.
// An absorbed path is treated as continuing with 0s forever, so visits to a
// target set containing 0 can be located past the stored prefix.
inline HitResult hitting_index(const LevelPath& path, const std::set<int>& target_set, std::size_t k) {
    for (int s : target_set)
        if (s < 0 || s > path.level)
            throw std::invalid_argument("hitting_index: target state outside path level");
    std::size_t seen = 0;
    for (std::size_t i = 0; i < path.entries.size(); ++i) {
        if (target_set.count(path.entries[i])) {
            if (seen == k) return HitResult::found(i);
            ++seen;
        }
    }
    if (path.absorbed()) {
        if (target_set.count(0)) {
            // Every index from entries.size() on is a visit to 0.
            return HitResult::found(path.entries.size() + (k - seen));
        }
        return HitResult::never();
    }
    return HitResult::unknown();
}

// Removes every excursion above targetLevel. An absorbed source projects to an
// absorbed (hence fully determined) path; otherwise the tail that a longer
// horizon might still reveal stays undetermined.
inline LevelPath project_path(const LevelPath& path, int target_level) {
    if (target_level > path.level)
        throw std::invalid_argument("project_path: target level exceeds source level");
    std::vector<int> kept;
    for (int s : path.entries)
        if (s <= target_level) kept.push_back(s);
    // An absorbed source keeps its trailing 0, so the output is absorbed too.
    std::size_t slots = path.horizon > kept.size() ? path.horizon : kept.size();
    return LevelPath(target_level, std::move(kept), slots);
}

struct VirtualPathPrefix {
    int top_level = 0;
    std::vector<LevelPath> per_level;  // index N holds the level-N path

    const LevelPath& level(int n) const { return per_level.at(static_cast<std::size_t>(n)); }

    void validate_shape() const {
        if (per_level.size() != static_cast<std::size_t>(top_level) + 1)
            throw std::invalid_argument("VirtualPathPrefix: level count mismatch");
        for (int n = 0; n <= top_level; ++n)
            if (level(n).level != n)
                throw std::invalid_argument("VirtualPathPrefix: level index mismatch at " + std::to_string(n));
    }
};

// Builds the whole tower from a fully determined top-level path.
inline VirtualPathPrefix tower_from_top(LevelPath top) {
    VirtualPathPrefix vp;
    vp.top_level = top.level;
    vp.per_level.resize(static_cast<std::size_t>(top.level) + 1);
    vp.per_level[static_cast<std::size_t>(top.level)] = std::move(top);
    for (int n = vp.top_level - 1; n >= 0; --n)
        vp.per_level[static_cast<std::size_t>(n)] =
            project_path(vp.per_level[static_cast<std::size_t>(n) + 1], n);
    return vp;
}

struct PathConsistencyViolation {
    int lower_level = 0;  // the pair is (lower_level, lower_level + 1)
    std::size_t index = 0;

    bool operator==(const PathConsistencyViolation& o) const {
        return lower_level == o.lower_level && index == o.index;
    }
};

// Per adjacent level pair, the first index where the stored lower path and the
// projection of the upper path both determine an entry and disagree. Empty
// report means the prefix is consistent on all determined overlap.
inline std::vector<PathConsistencyViolation> validate_virtual_prefix(const VirtualPathPrefix& vp) {
    vp.validate_shape();
    std::vector<PathConsistencyViolation> report;
    for (int n = 0; n + 1 <= vp.top_level; ++n) {
        LevelPath projected = project_path(vp.level(n + 1), n);
        const LevelPath& stored = vp.level(n);
        std::size_t span = std::max(projected.determined_len(), stored.determined_len());
        if (projected.absorbed() || stored.absorbed()) ++span;  // absorption extends determinacy
        for (std::size_t i = 0; i < span; ++i) {
            auto a = projected.entry_at(i);
            auto b = stored.entry_at(i);
            if (a && b && *a != *b) {
                report.push_back({n, i});
                break;
            }
        }
    }
    return report;
}

}  // namespace vmc
