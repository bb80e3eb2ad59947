#pragma once

// Command-line front end. run_cli is callable in-process; tools/treegrp_cli.cpp
// is a thin main around it.
//
// Exit codes: 0 pass, 1 falsification witness found, 2 usage or spec error,
// 3 resource guard.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fpg_modules.hpp"
#include "group_catalog.hpp"
#include "oracle.hpp"
#include "quotient_engine.hpp"
#include "spec_io.hpp"
#include "theorem_suite.hpp"

namespace treegrp {

enum ExitCode : int { kPass = 0, kFail = 1, kUsage = 2, kResource = 3 };

inline json group_info(const LoadedSpec& s) {
    const auto& G = s.group;
    json j;
    j["group"] = s.echo;
    j["p"] = G.p();
    j["generators"] = G.names();
    j["branch_type"] = to_string(G.branch_type());
    j["r_G"] = G.r_G();
    if (!G.is_sunic()) {
        j["torsion"] = G.is_torsion();
        j["r_dot"] = G.r_dot();
        j["csp"] = G.has_csp();
        j["class_E"] = G.in_class_E();
    } else {
        j["regular_branch"] = G.sunic().regular_branch();
    }
    return j;
}

inline int exit_for(const std::vector<CheckReport>& rs) {
    bool guard = false;
    for (const auto& r : rs) {
        if (r.status == Status::Fail) return kFail;
        guard = guard || r.resource_guard;
    }
    return guard ? kResource : kPass;
}

inline json report_json(const LoadedSpec& s, const SuiteOptions& o, const std::vector<CheckReport>& rs) {
    json j;
    j["group"] = s.echo;
    j["depth"] = o.depth;
    j["seed"] = o.seed;
    j["checks"] = json::array();
    for (const auto& r : rs) j["checks"].push_back(r.to_json());
    return j;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Normal subgroups of branch groups acting on p-adic trees, checked in congruence quotients"};
    app.require_subcommand(1);

    std::string spec_path, preset, other_path, other_preset, json_path, witness_path, which, check;
    int depth = 0, level = 0, jobs = 1;
    std::uint64_t seed = 1;
    std::size_t family = 20;
    bool timing = false, csv = false;
    EngineLimits limits;

    auto group_opts = [&](CLI::App* sc) {
        auto* a = sc->add_option("--spec", spec_path, "group spec JSON file");
        auto* b = sc->add_option("--preset", preset, "built-in group: fg3, fg5, gs3, sunic-grigorchuk, remark-group, appb-p5");
        a->excludes(b);
        sc->add_option("--max-pivots", limits.max_pivots, "engine guard: largest order exponent before giving up")->check(CLI::Range(1, 1000000));
    };
    auto* info = app.add_subcommand("info", "classification of the group");
    group_opts(info);
    auto* quot = app.add_subcommand("quotient", "order and generator portraits of G/St(n)");
    group_opts(quot);
    quot->add_option("--depth", depth, "n")->required()->check(CLI::Range(1, 12));
    auto* stab = app.add_subcommand("stab-dims", "t(m) = log_p |St(m):St(m+1)| for m < n");
    group_opts(stab);
    stab->add_option("--depth", depth, "n")->required()->check(CLI::Range(1, 12));
    stab->add_flag("--csv", csv, "CSV output");
    auto* chain = app.add_subcommand("chain", "uniserial chain between St(m+1) and St(m)");
    group_opts(chain);
    chain->add_option("--level", level, "m")->required()->check(CLI::Range(1, 11));
    chain->add_option("--depth", depth, "n (default m+1)")->check(CLI::Range(2, 12));
    auto* verify = app.add_subcommand("verify", "run a check, or all");
    group_opts(verify);
    verify->add_option("check", check, "check name or 'all'")->required();
    auto suite_opts = [&](CLI::App* sc) {
        sc->add_option("--depth", depth, "quotient depth (default per check)")->check(CLI::Range(1, 12));
        sc->add_option("--seed", seed, "family seed");
        sc->add_option("--level", level, "restrict the chain check to one level")->check(CLI::Range(1, 11));
        sc->add_option("--jobs", jobs, "worker threads")->check(CLI::Range(1, 64));
        sc->add_option("--family-size", family, "normal family size")->check(CLI::Range(1, 200));
        sc->add_flag("--timing", timing, "record wall time per check");
        auto* a = sc->add_option("--other", other_path, "second group spec (profinite check)");
        auto* b = sc->add_option("--other-preset", other_preset, "second group preset (profinite check)");
        a->excludes(b);
    };
    suite_opts(verify);
    auto* orac = app.add_subcommand("oracle", "brute-force cross-validation");
    group_opts(orac);
    orac->add_option("which", which, "bfs, submodules, normal-between, twisted, replay")
        ->required()
        ->check(CLI::IsMember({"bfs", "submodules", "normal-between", "twisted", "replay"}));
    orac->add_option("--depth", depth, "n")->check(CLI::Range(1, 12));
    orac->add_option("--level", level, "m")->check(CLI::Range(1, 11));
    orac->add_option("--witness", witness_path, "witness JSON (replay)");
    auto* rep = app.add_subcommand("report", "run every check and write the report");
    group_opts(rep);
    rep->add_option("--json", json_path, "output path")->required();
    suite_opts(rep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kPass;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kPass;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return kUsage;
    }

    auto load_group = [&](const std::string& path, const std::string& name) -> LoadedSpec {
        if (!path.empty()) return load_spec_file(path);
        if (!name.empty()) return load_preset(name);
        throw SpecError("", "one of --spec or --preset is required");
    };

    try {
        if (orac->parsed() && which == "replay") {
            if (witness_path.empty()) throw CLI::ValidationError("--witness", "required for replay");
            std::ifstream in(witness_path);
            if (!in) throw SpecError("", "cannot open " + witness_path);
            json w = json::parse(in);
            if (w.contains("witness")) w = w["witness"];
            const bool confirmed = replay_witness(w);
            out << json{{"kind", w.at("kind")}, {"claim", w.value("claim", "")}, {"failure_confirmed", confirmed}}.dump(2) << "\n";
            return confirmed ? kFail : kPass;
        }
        const LoadedSpec S = load_group(spec_path, preset);
        const GroupInstance& G = S.group;
        const unsigned p = G.p();

        if (info->parsed()) {
            out << group_info(S).dump(2) << "\n";
            return kPass;
        }
        if (quot->parsed()) {
            const Subgroup Gn = quotient(G, depth, limits);
            json j{{"group", S.echo}, {"depth", depth}, {"log_order", Gn.exponent()}};
            json gens = json::array();
            const auto g = G.generators(depth);
            for (std::size_t i = 0; i < g.size(); ++i) gens.push_back({{"name", G.names()[i]}, {"portrait", g[i].digits()}});
            j["generators"] = gens;
            out << j.dump(2) << "\n";
            return kPass;
        }
        if (stab->parsed()) {
            const Subgroup Gn = quotient(G, depth, limits);
            if (csv) {
                out << "m,t\n";
                for (int m = 0; m < depth; ++m) out << m << "," << Gn.layer_dim(m) << "\n";
            } else {
                json t = json::array();
                for (int m = 0; m < depth; ++m) t.push_back(Gn.layer_dim(m));
                out << json{{"group", S.echo}, {"depth", depth}, {"log_order", Gn.exponent()}, {"t", t}}.dump(2) << "\n";
            }
            return kPass;
        }
        if (chain->parsed()) {
            if (depth == 0) depth = level + 1;
            if (depth < level + 1) throw CLI::ValidationError("--depth", "needs depth >= level + 1");
            const Subgroup Gn = quotient(G, depth, limits);
            const FpSubspace U = Gn.image_in_Wm(level);
            const auto ch = uniserial_chain(U, wm_module(G, level));
            const RmResult R = compute_Rm(Gn, level);
            json layers = json::array();
            for (const auto& L : ch.layers) {
                const IndexTuple jt = tuple_of_dim(p, level, L.dim());
                layers.push_back({{"tuple", tuple_str(jt)}, {"dim", L.dim()}, {"is_V_j", vj_basis(p, jt) == L}, {"basis", subspace_json(L)}});
            }
            out << json{{"group", S.echo},       {"depth", depth},           {"level", level},
                        {"t", U.dim()},          {"top", tuple_str(R.top)}, {"uniserial", ch.uniserial},
                        {"matches_V_j", R.matches_chain}, {"layers", layers}}
                       .dump(2)
                << "\n";
            return ch.uniserial && R.matches_chain ? kPass : kFail;
        }
        if (orac->parsed()) {
            if (which == "bfs") {
                if (depth == 0) throw CLI::ValidationError("--depth", "required");
                const auto e = oracle::bfs_enumerate(G.generators(depth), G.prime(), depth);
                const std::size_t engine = quotient(G, depth, limits).exponent();
                out << json{{"depth", depth}, {"count", e.count}, {"exponent", e.exponent}, {"engine_exponent", engine}, {"agree", e.exponent == engine}}.dump(2)
                    << "\n";
                return e.exponent == engine ? kPass : kFail;
            }
            if (level == 0) throw CLI::ValidationError("--level", "required");
            if (which == "submodules") {
                const auto subs = oracle::brute_submodules(wm_module(G, level));
                json a = json::array();
                for (const auto& S2 : subs) a.push_back({{"dim", S2.dim()}, {"basis", subspace_json(S2)}});
                out << json{{"level", level}, {"count", subs.size()}, {"totally_ordered", oracle::totally_ordered(subs)}, {"submodules", a}}.dump(2) << "\n";
                return kPass;
            }
            if (which == "twisted") {
                GModule M = trivial_module(G);
                json rows = json::array();
                bool all = true;
                for (int m = 1; m <= level; ++m) {
                    M = twisted_sum(M, G);
                    const GModule W = wm_module(G, m);
                    bool eq = M.dim == W.dim;
                    for (std::size_t g = 0; eq && g < W.maps.size(); ++g) eq = M.maps[g] == W.maps[g];
                    rows.push_back({{"m", m}, {"equal", eq}});
                    all = all && eq;
                }
                out << json{{"twisted_equals_wm", rows}}.dump(2) << "\n";
                return all ? kPass : kFail;
            }
            // normal-between
            if (depth == 0) depth = level + 1;
            const Subgroup Gn = quotient(G, depth, limits);
            const auto nb = oracle::brute_normal_between(Gn, level);
            const auto ch = uniserial_chain(Gn.image_in_Wm(level), wm_module(G, level));
            std::vector<std::string> a, b;
            for (const auto& I : nb.images) a.push_back(I.key());
            for (const auto& L : ch.layers) b.push_back(L.key());
            b.push_back(FpSubspace(p, tree::level_size(p, level)).key());
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            json dims = json::array();
            for (const auto& I : nb.images) dims.push_back(I.dim());
            out << json{{"level", level}, {"depth", depth}, {"count", nb.images.size()}, {"dims", dims}, {"all_normal", nb.all_normal}, {"equals_chain", a == b}}.dump(2)
                << "\n";
            return a == b && nb.all_normal ? kPass : kFail;
        }
        // verify / report
        SuiteOptions o;
        o.depth = depth;
        o.seed = seed;
        o.family_size = family;
        o.family_cap = std::max<std::size_t>(family + 12, 32);
        o.timing = timing;
        o.limits = limits;
        if (level) o.level = level;
        std::optional<LoadedSpec> other;
        if (!other_path.empty() || !other_preset.empty()) other = load_group(other_path, other_preset);
        if (other) o.other = &other->group;
        std::vector<std::string> names;
        if (verify->parsed() && check != "all") {
            const auto& all = check_names();
            if (std::find(all.begin(), all.end(), check) == all.end()) throw CLI::ValidationError("check", "unknown check '" + check + "'");
            names.push_back(check);
        } else {
            names = check_names();
        }
        const auto rs = run_checks(names, G, o, static_cast<unsigned>(jobs));
        const json j = report_json(S, o, rs);
        if (rep->parsed()) {
            std::ofstream f(json_path);
            if (!f) throw SpecError("", "cannot write " + json_path);
            f << j.dump(2) << "\n";
            for (const auto& r : rs) out << r.name << ": " << to_string(r.status) << "\n";
        } else {
            out << j.dump(2) << "\n";
        }
        return exit_for(rs);
    } catch (const SpecError& e) {
        err << "spec error at " << e.what() << "\n";
        return kUsage;
    } catch (const CLI::Error& e) {
        err << e.what() << "\n";
        return kUsage;
    } catch (const ResourceExceeded& e) {
        err << "resource guard: " << e.what() << "\n";
        return kResource;
    } catch (const oracle::OracleCapExceeded& e) {
        err << "oracle cap: " << e.what() << "\n";
        return kResource;
    } catch (const std::invalid_argument& e) {
        err << e.what() << "\n";
        return kUsage;
    } catch (const json::exception& e) {
        err << "malformed JSON: " << e.what() << "\n";
        return kUsage;
    }
}

}  // namespace treegrp
