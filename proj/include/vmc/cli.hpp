#pragma once

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vmc/csv.hpp"
#include "vmc/json_io.hpp"
#include "vmc/parallel.hpp"
#include "vmc/vmc.hpp"

namespace vmc::cli {

// Exit codes: 0 success (zolaw: trivial), 1 zolaw non-trivial or failed check,
// 2 zolaw inconclusive, 64 usage error, 65 invalid input, 70 internal error.

namespace detail {

inline void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
    } else {
        write_text_file(out_path, text);
    }
}

inline std::uint64_t resolve_seed(std::optional<std::uint64_t> flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("VMC_SEED")) return std::strtoull(env, nullptr, 10);
    return 0;
}

struct LoadedModel {
    ModelSpec spec;
    VtmPrefix vtm;
};

inline LoadedModel load_model(const std::string& path) {
    ModelSpec spec = model_from_json(load_json_file(path));
    return {spec, make_vtm(spec)};
}

struct LoadedBalayage {
    Balayage pi;
    std::optional<BalayageFacts> facts;
    std::string name;
};

// --balayage takes a catalog name or a model file whose balayage is derived.
inline LoadedBalayage load_balayage(const std::string& arg, int length) {
    if (arg == "down" || arg == "two_down" || arg == "uniform")
        return {balayage_by_name(arg, length), balayage_facts_by_name(arg), arg};
    LoadedModel model = load_model(arg);
    return {balayage_of_vtm(model.vtm, length + 1), model_facts(model.spec).balayage,
            model.spec.family_name()};
}

inline std::vector<VirtualPathPrefix> towers_from_file(const std::string& path) {
    json j = load_json_file(path);
    std::vector<VirtualPathPrefix> towers;
    auto tower_from_path_array = [](const json& arr) {
        VirtualPathPrefix vp;
        std::vector<LevelPath> paths;
        for (const json& p : arr) paths.push_back(path_from_json(p));
        vp.top_level = static_cast<int>(paths.size()) - 1;
        vp.per_level.resize(paths.size());
        for (LevelPath& p : paths) {
            if (p.level < 0 || p.level > vp.top_level) throw std::invalid_argument("path levels must be 0..L");
            vp.per_level[static_cast<std::size_t>(p.level)] = std::move(p);
        }
        vp.validate_shape();
        return vp;
    };
    if (j.is_object()) {
        towers.push_back(tower_from_json(j));
    } else if (j.is_array() && !j.empty() && j.front().is_object() && j.front().contains("entries")) {
        towers.push_back(tower_from_path_array(j));
    } else if (j.is_array()) {
        for (const json& t : j)
            towers.push_back(t.is_array() ? tower_from_path_array(t) : tower_from_json(t));
    } else {
        throw std::invalid_argument("paths file: expected a tower object or an array");
    }
    return towers;
}

struct SmcInstance {
    MarginalSequence marginals;
    std::optional<Balayage> pi;
    std::optional<BalayageFacts> facts;
};

// SMC spec: {"balayage": <name or {"model": path}>, "point": <vid spec>} or
// {"marginals": [[...], ...], "balayage": optional}.
inline SmcInstance load_smc(const std::string& path, int top_level) {
    json j = load_json_file(path);
    SmcInstance out;
    std::optional<LoadedBalayage> pi;
    if (j.contains("balayage")) {
        const json& b = j.at("balayage");
        pi = b.is_string() ? load_balayage(b.get<std::string>(), top_level)
                           : load_balayage(b.at("model").get<std::string>(), top_level);
    }
    if (j.contains("marginals")) {
        int level = 0;
        for (const json& d : j.at("marginals")) out.marginals.levels.push_back(distribution_from_json(d, level++));
        if (out.marginals.top_level() < top_level)
            throw std::invalid_argument("smc spec: explicit marginals shorter than --levels");
        out.marginals.levels.resize(static_cast<std::size_t>(top_level) + 1);
    } else {
        if (!pi) throw std::invalid_argument("smc spec: a point needs a balayage");
        VidSpec point = vid_from_json(j.at("point"));
        if (point.kind == VidSpec::Kind::Mixture) {
            std::vector<std::pair<Rational, MarginalSequence>> parts;
            for (const auto& c : point.components)
                parts.emplace_back(c.weight, materialize_point(c.kind, c.a, c.label, pi->pi, pi->facts, top_level));
            out.marginals = mix_marginals(parts);
        } else if (point.kind == VidSpec::Kind::Explicit) {
            throw std::invalid_argument("smc spec: use the top-level \"marginals\" key for explicit sequences");
        } else {
            out.marginals = materialize_point(point.kind, point.a, point.label, pi->pi, pi->facts, top_level);
        }
    }
    if (pi) {
        out.pi = std::move(pi->pi);
        out.facts = std::move(pi->facts);
    }
    return out;
}

}  // namespace detail

inline int run(std::vector<std::string> args) {
    CLI::App app{"virtual Markov chain toolkit"};
    app.require_subcommand(1);

    std::string model_path, vid_path, paths_path, out_path, balayage_arg, smc_path;
    int levels = 8, steps = 64, a_param = 1, amax = 32, kmax = 2, m_level = 1, c_state = 0, n_level = 1, to_level = 0;
    long replicates = 1;
    std::optional<std::uint64_t> seed_flag;

    auto add_seed = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed_flag, "RNG seed (default: VMC_SEED env, then 0)");
    };
    auto add_out = [&](CLI::App* cmd) { cmd->add_option("--out", out_path, "output file (default: stdout)"); };

    CLI::App* check = app.add_subcommand("check", "validate a model and/or path file");
    check->add_option("--model", model_path, "model spec JSON");
    check->add_option("--vid", vid_path, "VID spec JSON (needs --model)");
    check->add_option("--levels", levels, "levels to validate")->check(CLI::NonNegativeNumber);
    check->add_option("--paths", paths_path, "path/tower JSON to validate");
    add_out(check);

    CLI::App* simulate = app.add_subcommand("simulate", "sample towers from a compatible (VID, VTM) pair");
    simulate->add_option("--model", model_path)->required();
    simulate->add_option("--vid", vid_path)->required();
    simulate->add_option("--level", levels, "top level")->check(CLI::NonNegativeNumber);
    simulate->add_option("--steps", steps, "time horizon")->check(CLI::PositiveNumber);
    simulate->add_option("--replicates", replicates)->check(CLI::PositiveNumber);
    add_seed(simulate);
    simulate->add_option("--out", out_path, "output directory")->required();

    CLI::App* decompose = app.add_subcommand("decompose", "staircase decomposition of observed towers");
    decompose->add_option("--paths", paths_path)->required();
    decompose->add_option("--amax", amax, "track states 1..amax")->check(CLI::PositiveNumber);
    decompose->add_option("--kmax", kmax, "visit indices k = 0..kmax-1")->check(CLI::PositiveNumber);
    add_out(decompose);

    CLI::App* project = app.add_subcommand("project", "project paths down to a level");
    project->add_option("--paths", paths_path)->required();
    project->add_option("--to", to_level, "target level")->required()->check(CLI::NonNegativeNumber);
    add_out(project);

    CLI::App* simplex = app.add_subcommand("simplex", "simplex diagnostics for a balayage");
    simplex->require_subcommand(1);
    CLI::App* deltas = simplex->add_subcommand("deltas", "delta point as a lower-triangular table");
    CLI::App* sternfeld = simplex->add_subcommand("sternfeld", "second-moment compactness statistic");
    CLI::App* k0 = simplex->add_subcommand("k0", "top-coordinate sequence of the representing matrix");
    CLI::App* limits = simplex->add_subcommand("limits", "cluster truncated delta points");
    for (CLI::App* cmd : {deltas, sternfeld, k0, limits}) {
        cmd->add_option("--balayage", balayage_arg, "down|two_down|uniform or a model JSON")->required();
        add_out(cmd);
    }
    deltas->add_option("--a", a_param, "state")->required();
    deltas->add_option("--levels", levels, "rows to print");
    sternfeld->add_option("--M", m_level)->required();
    sternfeld->add_option("--c", c_state)->required();
    sternfeld->add_option("--N", n_level)->required();
    sternfeld->add_option("--amax", amax, "largest start state")->required();
    k0->add_option("--N", n_level)->required();
    k0->add_option("--amax", amax, "largest start state")->required();
    limits->add_option("--levels", levels, "truncation level");
    limits->add_option("--amax", amax, "scan states 0..amax")->required();

    CLI::App* smc = app.add_subcommand("smc", "staircase chain sampling and verification");
    smc->require_subcommand(1);
    CLI::App* smc_sample = smc->add_subcommand("sample", "sample staircase paths as CSV");
    CLI::App* smc_verify = smc->add_subcommand("verify", "empirical marginal and backward checks");
    for (CLI::App* cmd : {smc_sample, smc_verify}) {
        cmd->add_option("--model", smc_path, "SMC spec JSON")->required();
        cmd->add_option("--levels", levels)->check(CLI::NonNegativeNumber);
        cmd->add_option("--replicates", replicates)->check(CLI::PositiveNumber);
        add_seed(cmd);
        add_out(cmd);
    }

    CLI::App* classify = app.add_subcommand("classify", "exact visit classification per state");
    classify->add_option("--model", model_path)->required();
    classify->add_option("--vid", vid_path)->required();
    classify->add_option("--amax", amax)->check(CLI::PositiveNumber);
    add_out(classify);

    CLI::App* zolaw = app.add_subcommand("zolaw", "tail sigma-algebra triviality verdict");
    zolaw->add_option("--model", model_path)->required();
    zolaw->add_option("--vid", vid_path)->required();
    zolaw->add_option("--amax", amax)->check(CLI::PositiveNumber);
    add_out(zolaw);

    std::vector<const char*> argv;
    argv.push_back("vmc");
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 64;
    }

    try {
        if (app.got_subcommand(check)) {
            json report;
            bool ok = true;
            if (!model_path.empty()) {
                detail::LoadedModel model = detail::load_model(model_path);
                json viols = json::array();
                for (const auto& v : validate_vtm(model.vtm, levels))
                    viols.push_back({{"level", v.level}, {"row", v.row}, {"col", v.col}});
                ok = ok && viols.empty();
                report["vtm_violations"] = viols;
                if (!vid_path.empty()) {
                    VidSpec vid_spec = vid_from_json(load_json_file(vid_path));
                    MarginalSequence nu = materialize_vid(vid_spec, model.spec, model.vtm, levels);
                    VidPrefix vid = vid_of_marginals(nu);
                    json mono = json::array(), compat = json::array();
                    for (const auto& v : validate_vid(vid)) mono.push_back({{"level", v.level}, {"state", v.state}});
                    for (const auto& v : validate_compatibility(vid, model.vtm))
                        compat.push_back({{"level", v.level}, {"state", v.state}});
                    ok = ok && mono.empty() && compat.empty();
                    report["vid_monotonicity"] = mono;
                    report["compatibility"] = compat;
                }
            }
            if (!paths_path.empty()) {
                json path_reports = json::array();
                for (const VirtualPathPrefix& vp : detail::towers_from_file(paths_path)) {
                    json viols = json::array();
                    for (const auto& v : validate_virtual_prefix(vp))
                        viols.push_back({{"level_pair", {v.lower_level, v.lower_level + 1}}, {"index", v.index}});
                    ok = ok && viols.empty();
                    path_reports.push_back(viols);
                }
                report["path_violations"] = path_reports;
            }
            report["ok"] = ok;
            detail::emit(report.dump(2), out_path);
            return ok ? 0 : 1;
        }

        if (app.got_subcommand(simulate)) {
            detail::LoadedModel model = detail::load_model(model_path);
            VidSpec vid_spec = vid_from_json(load_json_file(vid_path));
            MarginalSequence nu = materialize_vid(vid_spec, model.spec, model.vtm, levels);
            VidPrefix vid = vid_of_marginals(nu);
            auto compat = validate_compatibility(vid, model.vtm);
            if (!compat.empty())
                throw std::invalid_argument("simulate: VID incompatible with model at level " +
                                            std::to_string(compat.front().level));
            VmcSampler sampler(vid, model.vtm, levels);
            std::uint64_t seed = detail::resolve_seed(seed_flag);
            std::vector<json> towers(static_cast<std::size_t>(replicates));
            parallel_replicates(static_cast<std::size_t>(replicates), [&](std::size_t r) {
                RandomStream rng = RandomStream::derive(seed, r);
                towers[r] = tower_to_json(sampler.sample(steps, rng));
            });
            json doc = json::array();
            for (json& t : towers) doc.push_back(std::move(t));
            std::filesystem::create_directories(out_path);
            write_text_file((std::filesystem::path(out_path) / "paths.json").string(), doc.dump(2));
            return 0;
        }

        if (app.got_subcommand(decompose)) {
            std::vector<VirtualPathPrefix> towers = detail::towers_from_file(paths_path);
            json doc;
            if (towers.size() == 1) {
                doc = decomposition_to_json(staircase_decomposition(towers[0], amax, kmax - 1));
            } else {
                doc = json::array();
                for (const VirtualPathPrefix& vp : towers)
                    doc.push_back(decomposition_to_json(staircase_decomposition(vp, amax, kmax - 1)));
            }
            detail::emit(doc.dump(2), out_path);
            return 0;
        }

        if (app.got_subcommand(project)) {
            json j = load_json_file(paths_path);
            json doc = json::array();
            if (j.is_object()) j = json::array({j});
            for (const json& p : j) doc.push_back(path_to_json(project_path(path_from_json(p), to_level)));
            detail::emit(doc.dump(2), out_path);
            return 0;
        }

        if (app.got_subcommand(simplex)) {
            if (simplex->got_subcommand(deltas)) {
                detail::LoadedBalayage pi = detail::load_balayage(balayage_arg, std::max(levels, a_param));
                MarginalSequence m = delta_point(pi.pi, a_param, levels);
                json rows = json::array();
                for (const LevelDistribution& d : m.levels) rows.push_back(distribution_to_json(d));
                json doc{{"balayage", pi.name}, {"a", a_param}, {"levels", rows}};
                detail::emit(doc.dump(2), out_path);
            } else if (simplex->got_subcommand(sternfeld)) {
                detail::LoadedBalayage pi = detail::load_balayage(balayage_arg, amax);
                SternfeldStatistic st = sternfeld_statistic(pi.pi, m_level, c_state, n_level, n_level, amax);
                detail::emit(sternfeld_csv({st}), out_path);
            } else if (simplex->got_subcommand(k0)) {
                detail::LoadedBalayage pi = detail::load_balayage(balayage_arg, amax);
                detail::emit(k0_csv(n_level, 0, k0_sequence(pi.pi, n_level, 0, amax)), out_path);
            } else {
                detail::LoadedBalayage pi = detail::load_balayage(balayage_arg, std::max(levels, amax));
                LimitScanResult scan = limit_scan(pi.pi, levels, 0, amax);
                json groups = json::array();
                for (const LimitScanGroup& g : scan.groups) {
                    json prefix = json::array();
                    for (const LevelDistribution& d : g.prefix) prefix.push_back(distribution_to_json(d));
                    groups.push_back({{"members", g.members}, {"tail_candidate", g.tail_candidate}, {"prefix", prefix}});
                }
                json doc{{"truncation_level", scan.truncation_level},
                         {"a_lo", scan.a_lo},
                         {"a_hi", scan.a_hi},
                         {"groups", groups}};
                detail::emit(doc.dump(2), out_path);
            }
            return 0;
        }

        if (app.got_subcommand(smc)) {
            detail::SmcInstance inst = detail::load_smc(smc_path, levels);
            SmcKernel kernel(inst.marginals);
            std::uint64_t seed = detail::resolve_seed(seed_flag);
            std::vector<StaircasePrefix> samples(static_cast<std::size_t>(replicates));
            parallel_replicates(static_cast<std::size_t>(replicates), [&](std::size_t r) {
                RandomStream rng = RandomStream::derive(seed, r);
                samples[r] = sample_staircase(kernel, levels, rng);
            });
            if (smc->got_subcommand(smc_sample)) {
                detail::emit(staircase_samples_csv(samples), out_path);
                return 0;
            }
            EmpiricalMarginals emp = empirical_marginals(samples, kernel.marginals());
            json doc;
            doc["levels"] = levels;
            doc["replicates"] = replicates;
            json tvs = json::array();
            for (const Rational& tv : emp.tv) tvs.push_back(to_decimal_string(tv));
            doc["marginal_tv"] = tvs;
            doc["max_marginal_tv"] = to_decimal_string(emp.max_tv());
            if (inst.pi) {
                json backward = json::array();
                for (int n = 0; n + 1 <= levels; ++n) {
                    try {
                        BackwardCheck bc = backward_check(samples, *inst.pi, n);
                        backward.push_back({{"level", n},
                                            {"count", bc.conditioning_count},
                                            {"tv", to_decimal_string(bc.tv)}});
                    } catch (const ConditioningEventUnobserved&) {
                        backward.push_back({{"level", n}, {"count", 0}, {"tv", nullptr}});
                    }
                }
                doc["backward"] = backward;
            }
            detail::emit(doc.dump(2), out_path);
            return 0;
        }

        if (app.got_subcommand(classify)) {
            detail::LoadedModel model = detail::load_model(model_path);
            VidSpec vid_spec = vid_from_json(load_json_file(vid_path));
            MarginalSequence nu = materialize_vid(vid_spec, model.spec, model.vtm, amax);
            VidPrefix vid = vid_of_marginals(nu);
            std::vector<StateClassification> rows;
            for (int a = 1; a <= amax; ++a) rows.push_back(classify_state(vid, model.vtm, a));
            detail::emit(classification_csv(rows), out_path);
            return 0;
        }

        if (app.got_subcommand(zolaw)) {
            detail::LoadedModel model = detail::load_model(model_path);
            VidSpec vid_spec = vid_from_json(load_json_file(vid_path));
            ZolawOptions opts;
            opts.a_max = amax;
            opts.level_depth = amax + 4;
            MarginalSequence nu = materialize_vid(vid_spec, model.spec, model.vtm, opts.level_depth);
            ZeroOneReport report = evaluate(model.spec, model.vtm, nu, opts);
            detail::emit(zolaw_report_to_json(report).dump(2), out_path);
            switch (report.verdict) {
                case TailVerdict::Trivial: return 0;
                case TailVerdict::NonTrivial: return 1;
                case TailVerdict::Inconclusive: return 2;
            }
        }
    } catch (const InternalUnreachableState& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 70;
    } catch (const std::logic_error& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 70;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 65;
    }
    return 64;
}

}  // namespace vmc::cli
