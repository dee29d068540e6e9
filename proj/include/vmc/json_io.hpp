#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vmc/catalog.hpp"
#include "vmc/families.hpp"
#include "vmc/marginal.hpp"
#include "vmc/path.hpp"
#include "vmc/vid.hpp"
#include "vmc/vmcsim.hpp"
#include "vmc/zolaw.hpp"

namespace vmc {

using nlohmann::json;

inline json rational_to_json(const Rational& r) { return to_fraction_string(r); }

inline Rational rational_from_json(const json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long>());
    throw std::invalid_argument("expected a rational as \"p/q\" string, got " + j.dump());
}

inline json distribution_to_json(const LevelDistribution& d) {
    json arr = json::array();
    for (const Rational& w : d.weights) arr.push_back(rational_to_json(w));
    return arr;
}

inline LevelDistribution distribution_from_json(const json& j, int level) {
    LevelDistribution d;
    d.level = level;
    for (const json& w : j) d.weights.push_back(rational_from_json(w));
    d.validate("distribution at level " + std::to_string(level));
    return d;
}

// ---- model specs -----------------------------------------------------------

inline json model_to_json(const ModelSpec& spec) {
    json j;
    j["family"] = spec.family_name();
    switch (spec.family) {
        case ModelSpec::Family::DownFromInfinity: {
            json q = json::array();
            for (const Rational& v : spec.q) q.push_back(rational_to_json(v));
            j["q"] = q;
            break;
        }
        case ModelSpec::Family::Classical: {
            json m = json::array();
            for (const auto& row : spec.classical_matrix) {
                json r = json::array();
                for (const Rational& v : row) r.push_back(rational_to_json(v));
                m.push_back(r);
            }
            j["matrix"] = m;
            break;
        }
        case ModelSpec::Family::Explicit: {
            json levels = json::array();
            for (const StochasticLevelMatrix& k : spec.explicit_levels) {
                json m = json::array();
                for (const auto& row : k.rows) {
                    json r = json::array();
                    for (const Rational& v : row) r.push_back(rational_to_json(v));
                    m.push_back(r);
                }
                levels.push_back(m);
            }
            j["levels"] = levels;
            break;
        }
        default:
            break;
    }
    return j;
}

inline ModelSpec model_from_json(const json& j) {
    ModelSpec spec;
    const std::string family = j.at("family").get<std::string>();
    if (family == "down_from_infinity") {
        spec.family = ModelSpec::Family::DownFromInfinity;
        if (j.at("q").is_string()) {
            spec.q.push_back(rational_from_json(j.at("q")));
        } else {
            for (const json& v : j.at("q")) spec.q.push_back(rational_from_json(v));
        }
        if (spec.q.empty()) throw std::invalid_argument("down_from_infinity: empty q list");
        for (const Rational& v : spec.q)
            if (v < 0 || v > 1) throw std::invalid_argument("down_from_infinity: q outside [0,1]");
    } else if (family == "two_ladders") {
        spec.family = ModelSpec::Family::TwoLadders;
    } else if (family == "infinite_clique") {
        spec.family = ModelSpec::Family::InfiniteClique;
    } else if (family == "classical") {
        spec.family = ModelSpec::Family::Classical;
        for (const json& row : j.at("matrix")) {
            std::vector<Rational> r;
            for (const json& v : row) r.push_back(rational_from_json(v));
            spec.classical_matrix.push_back(std::move(r));
        }
    } else if (family == "explicit") {
        spec.family = ModelSpec::Family::Explicit;
        int level = 0;
        for (const json& mat : j.at("levels")) {
            StochasticLevelMatrix k;
            k.level = level;
            for (const json& row : mat) {
                std::vector<Rational> r;
                for (const json& v : row) r.push_back(rational_from_json(v));
                k.rows.push_back(std::move(r));
            }
            k.validate("explicit level " + std::to_string(level));
            spec.explicit_levels.push_back(std::move(k));
            ++level;
        }
    } else {
        throw std::invalid_argument("unknown model family '" + family + "'");
    }
    return spec;
}

// ---- VID specs --------------------------------------------------------------

struct VidSpec {
    enum class Kind { Zero, Delta, Limit, Mixture, Explicit };
    Kind kind = Kind::Zero;
    int a = 0;
    std::string label;
    struct Component {
        Rational weight;
        Kind kind = Kind::Zero;
        int a = 0;
        std::string label;
    };
    std::vector<Component> components;
    std::vector<LevelDistribution> explicit_levels;
};

inline VidSpec vid_from_json(const json& j) {
    VidSpec spec;
    const std::string kind = j.at("vid").get<std::string>();
    auto parse_kind = [](const std::string& k) {
        if (k == "zero") return VidSpec::Kind::Zero;
        if (k == "delta") return VidSpec::Kind::Delta;
        if (k == "limit") return VidSpec::Kind::Limit;
        if (k == "mixture") return VidSpec::Kind::Mixture;
        if (k == "explicit") return VidSpec::Kind::Explicit;
        throw std::invalid_argument("unknown vid kind '" + k + "'");
    };
    spec.kind = parse_kind(kind);
    if (spec.kind == VidSpec::Kind::Delta) spec.a = j.at("a").get<int>();
    if (spec.kind == VidSpec::Kind::Limit && j.contains("label")) spec.label = j.at("label").get<std::string>();
    if (spec.kind == VidSpec::Kind::Mixture) {
        for (const json& c : j.at("components")) {
            VidSpec::Component comp;
            comp.weight = rational_from_json(c.at("weight"));
            comp.kind = parse_kind(c.at("vid").get<std::string>());
            if (comp.kind == VidSpec::Kind::Mixture || comp.kind == VidSpec::Kind::Explicit)
                throw std::invalid_argument("mixture components must be zero/delta/limit");
            if (comp.kind == VidSpec::Kind::Delta) comp.a = c.at("a").get<int>();
            if (comp.kind == VidSpec::Kind::Limit && c.contains("label"))
                comp.label = c.at("label").get<std::string>();
            spec.components.push_back(std::move(comp));
        }
    }
    if (spec.kind == VidSpec::Kind::Explicit) {
        int level = 0;
        for (const json& d : j.at("levels"))
            spec.explicit_levels.push_back(distribution_from_json(d, level++));
    }
    return spec;
}

inline json vid_to_json(const VidSpec& spec) {
    json j;
    auto kind_name = [](VidSpec::Kind k) {
        switch (k) {
            case VidSpec::Kind::Zero: return "zero";
            case VidSpec::Kind::Delta: return "delta";
            case VidSpec::Kind::Limit: return "limit";
            case VidSpec::Kind::Mixture: return "mixture";
            case VidSpec::Kind::Explicit: return "explicit";
        }
        return "?";
    };
    j["vid"] = kind_name(spec.kind);
    if (spec.kind == VidSpec::Kind::Delta) j["a"] = spec.a;
    if (spec.kind == VidSpec::Kind::Limit && !spec.label.empty()) j["label"] = spec.label;
    if (spec.kind == VidSpec::Kind::Mixture) {
        json comps = json::array();
        for (const auto& c : spec.components) {
            json cj;
            cj["weight"] = rational_to_json(c.weight);
            cj["vid"] = kind_name(c.kind);
            if (c.kind == VidSpec::Kind::Delta) cj["a"] = c.a;
            if (c.kind == VidSpec::Kind::Limit && !c.label.empty()) cj["label"] = c.label;
            comps.push_back(cj);
        }
        j["components"] = comps;
    }
    if (spec.kind == VidSpec::Kind::Explicit) {
        json levels = json::array();
        for (const LevelDistribution& d : spec.explicit_levels) levels.push_back(distribution_to_json(d));
        j["levels"] = levels;
    }
    return j;
}

// An atomic point of the simplex, built against a balayage and its facts.
inline MarginalSequence materialize_point(VidSpec::Kind kind, int a, const std::string& label,
                                          const Balayage& pi, const std::optional<BalayageFacts>& facts,
                                          int top_level) {
    switch (kind) {
        case VidSpec::Kind::Zero:
            return zero_marginals(top_level);
        case VidSpec::Kind::Delta:
            return delta_point(pi, a, top_level);
        case VidSpec::Kind::Limit: {
            if (!facts || facts->limits.empty())
                throw std::invalid_argument("limit point: no catalogued limits for this balayage");
            for (const LimitPointForm& form : facts->limits)
                if (label.empty() || form.label == label) return form.materialize(top_level);
            throw std::invalid_argument("limit point: no limit labeled '" + label + "'");
        }
        default:
            throw std::invalid_argument("materialize_point: not an atomic kind");
    }
}

namespace detail {

inline MarginalSequence materialize_atomic_vid(VidSpec::Kind kind, int a, const std::string& label,
                                               const ModelSpec& model, const VtmPrefix& vtm, int top_level) {
    Balayage pi = balayage_of_vtm(vtm, std::max(a, top_level));
    return materialize_point(kind, a, label, pi, model_facts(model).balayage, top_level);
}

}  // namespace detail

// Materializes a VID description against a model, through the given level.
// Symbolic kinds carry their tags so downstream evidence can use them.
inline MarginalSequence materialize_vid(const VidSpec& spec, const ModelSpec& model, const VtmPrefix& vtm,
                                        int top_level) {
    switch (spec.kind) {
        case VidSpec::Kind::Zero:
        case VidSpec::Kind::Delta:
        case VidSpec::Kind::Limit:
            return detail::materialize_atomic_vid(spec.kind, spec.a, spec.label, model, vtm, top_level);
        case VidSpec::Kind::Mixture: {
            std::vector<std::pair<Rational, MarginalSequence>> parts;
            for (const auto& c : spec.components)
                parts.emplace_back(c.weight,
                                   detail::materialize_atomic_vid(c.kind, c.a, c.label, model, vtm, top_level));
            return mix_marginals(parts);
        }
        case VidSpec::Kind::Explicit: {
            if (static_cast<int>(spec.explicit_levels.size()) <= top_level)
                throw std::invalid_argument("explicit VID shorter than requested level");
            MarginalSequence m;
            m.levels.assign(spec.explicit_levels.begin(), spec.explicit_levels.begin() + top_level + 1);
            return m;
        }
    }
    throw std::logic_error("materialize_vid: unreachable");
}

// ---- paths ------------------------------------------------------------------

inline json path_to_json(const LevelPath& p) {
    json entries = json::array();
    for (int s : p.entries) entries.push_back(s);
    for (std::size_t i = p.entries.size(); i < p.horizon; ++i) entries.push_back(nullptr);
    json j;
    j["level"] = p.level;
    j["entries"] = entries;
    j["determined_len"] = p.determined_len();
    return j;
}

inline LevelPath path_from_json(const json& j) {
    const int level = j.at("level").get<int>();
    std::vector<int> determined;
    std::size_t horizon = 0;
    for (const json& e : j.at("entries")) {
        ++horizon;
        if (e.is_null()) continue;
        if (horizon != determined.size() + 1)
            throw std::invalid_argument("path entries: undetermined slots must form a suffix");
        determined.push_back(e.get<int>());
    }
    if (j.contains("determined_len") &&
        j.at("determined_len").get<std::size_t>() != determined.size())
        throw std::invalid_argument("path entries: determined_len disagrees with null padding");
    return LevelPath(level, std::move(determined), horizon);
}

inline json tower_to_json(const VirtualPathPrefix& vp) {
    json levels = json::array();
    for (const LevelPath& p : vp.per_level) levels.push_back(path_to_json(p));
    json j;
    j["top_level"] = vp.top_level;
    j["levels"] = levels;
    return j;
}

inline VirtualPathPrefix tower_from_json(const json& j) {
    VirtualPathPrefix vp;
    vp.top_level = j.at("top_level").get<int>();
    for (const json& p : j.at("levels")) vp.per_level.push_back(path_from_json(p));
    vp.validate_shape();
    return vp;
}

// ---- decomposition ----------------------------------------------------------

inline json decomposition_to_json(const DecompositionPrefix& d) {
    auto entries_to_json = [](const std::vector<std::optional<int>>& entries) {
        json arr = json::array();
        for (const auto& e : entries) {
            if (e) arr.push_back(*e);
            else arr.push_back(nullptr);
        }
        return arr;
    };
    json j;
    j["top_level"] = d.top_level;
    j["s0"] = entries_to_json(d.s0);
    json sak = json::array();
    for (const auto& [key, entries] : d.sak) {
        json row;
        row["a"] = key.first;
        row["k"] = key.second;
        row["entries"] = entries_to_json(entries);
        sak.push_back(row);
    }
    j["sak"] = sak;
    json counts = json::array();
    for (const auto& [a, vc] : d.visit_counts) {
        json c;
        c["a"] = a;
        c["count"] = vc.count;
        c["exact"] = vc.exact;
        counts.push_back(c);
    }
    j["visit_counts"] = counts;
    return j;
}

// ---- zero-one law report ----------------------------------------------------

inline json evidence_to_json(const ExtremalityEvidence& ev) {
    json j;
    j["status"] = to_string(ev.status);
    j["method"] = to_string(ev.method);
    j["truncation_level"] = ev.truncation_level;
    j["candidate_bound"] = ev.candidate_bound;
    if (ev.delta_a >= 0) j["a"] = ev.delta_a;
    if (!ev.label.empty()) j["label"] = ev.label;
    if (ev.split) {
        json s;
        s["alpha"] = rational_to_json(ev.split->alpha);
        json left = json::array(), right = json::array();
        for (const auto& d : ev.split->left.levels) left.push_back(distribution_to_json(d));
        for (const auto& d : ev.split->right.levels) right.push_back(distribution_to_json(d));
        s["left"] = left;
        s["right"] = right;
        j["split"] = s;
    }
    if (!ev.trend.empty()) {
        json t = json::array();
        for (const TrendPoint& p : ev.trend) {
            json row;
            row["M"] = p.m_level;
            row["c"] = p.state;
            row["N"] = p.n_level;
            row["defect"] = rational_to_json(p.defect);
            t.push_back(row);
        }
        j["trend"] = t;
    }
    return j;
}

inline json zolaw_report_to_json(const ZeroOneReport& r) {
    json j;
    j["verdict"] = to_string(r.verdict);
    j["a_max"] = r.a_max;
    j["level_depth"] = r.level_depth;
    j["classical_shortcircuit"] = r.classical_shortcircuit;
    j["vid_extremality"] = evidence_to_json(r.vid_evidence);
    json cls = json::array();
    for (const StateClassification& c : r.classifications) {
        json row;
        row["a"] = c.a;
        row["q"] = rational_to_json(c.q);
        row["p"] = rational_to_json(c.p);
        row["verdict"] = to_string(c.verdict);
        cls.push_back(row);
    }
    j["classifications"] = cls;
    json rows = json::object();
    for (const auto& [a, ev] : r.row_evidence) rows[std::to_string(a)] = evidence_to_json(ev);
    j["row_extremality"] = rows;
    j["randomly_visited"] = r.randomly_visited;
    j["tail_classification_certified"] = r.tail_classification_certified;
    if (r.row_tail) {
        j["row_tail"] = {{"from_a", r.row_tail->from_a}, {"all_extreme", r.row_tail->all_extreme}};
    }
    j["notes"] = r.notes;
    return j;
}

// ---- file helpers -----------------------------------------------------------

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    in >> j;
    return j;
}

// Atomic write: the target never holds a half-written document.
inline void write_text_file(const std::string& path, const std::string& text) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
        out << text;
        if (!out) throw std::runtime_error("write failed on " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("cannot move " + tmp + " into place");
}

}  // namespace vmc
