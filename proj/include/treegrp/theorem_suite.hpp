#pragma once

// Desk-scale verification of the structural results on normal subgroups of
// branch groups: effective congruence subgroup bounds, branching inclusions,
// the uniserial chain between consecutive level stabilizers, normal rank and
// central width bounds, congruence equivalence with multi-GGS groups, and the
// Sunic-group analogues.
//
// Every inclusion is tested in a finite quotient G_n. A failure there is a
// genuine counterexample; a pass is consistency only, so reports carry a
// one_sided flag.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "fp_linalg.hpp"
#include "fpg_modules.hpp"
#include "group_catalog.hpp"
#include "oracle.hpp"
#include "quotient_engine.hpp"
#include "tree_core.hpp"

namespace treegrp {

using json = nlohmann::ordered_json;

enum class Status { Pass, Fail, Skipped };

inline std::string to_string(Status s) {
    switch (s) {
        case Status::Pass: return "pass";
        case Status::Fail: return "fail";
        case Status::Skipped: return "skipped";
    }
    return "?";
}

struct CheckReport {
    std::string name;
    Status status = Status::Skipped;
    bool one_sided = true;
    json details = json::object();
    json witness = nullptr;
    long long millis = 0;
    bool resource_guard = false;

    json to_json() const {
        json j;
        j["name"] = name;
        j["status"] = to_string(status);
        j["one_sided"] = one_sided;
        j["details"] = details;
        j["witness"] = witness;
        j["millis"] = millis;
        return j;
    }
};

struct SuiteOptions {
    int depth = 0;  // 0: per-check default
    std::uint64_t seed = 1;
    std::size_t family_size = 20;
    std::size_t family_cap = 32;
    std::size_t samples = 4;
    std::size_t oracle_cap_t = 6;
    std::optional<int> level;
    const GroupInstance* other = nullptr;
    EngineLimits limits;
    bool timing = false;
};

// --- serialization helpers ---

inline json portraits_json(const std::vector<Portrait>& v) {
    json a = json::array();
    for (const auto& x : v) a.push_back(x.digits());
    return a;
}

inline json subspace_json(const FpSubspace& S) {
    json a = json::array();
    for (const auto& r : S.basis()) a.push_back(fp::digits(r));
    return a;
}

/// Witness that element (claimed to be in the normal closure of seeds under
/// normalizers, or in the subgroup generated by seeds when normalizers is
/// empty) is not a member.
inline json membership_witness(const Portrait& element, const std::vector<Portrait>& seeds, const std::vector<Portrait>& normalizers,
                               const std::string& claim) {
    json w;
    w["kind"] = "membership";
    w["claim"] = claim;
    w["p"] = element.p();
    w["depth"] = element.depth();
    w["element"] = element.digits();
    w["seeds"] = portraits_json(seeds);
    w["normalizers"] = portraits_json(normalizers);
    w["expected_member"] = true;
    return w;
}

/// First pivot of A outside B, if any.
inline std::optional<Portrait> inclusion_counterexample(const Subgroup& A, const Subgroup& B) {
    for (const auto& x : A.pivots())
        if (!B.contains(x)) return x;
    return std::nullopt;
}

/// Witness for A == B failing: an element of one side outside the other.
inline json equality_witness(const Subgroup& A, const Subgroup& B, const std::string& claim) {
    if (auto bad = inclusion_counterexample(A, B)) return membership_witness(*bad, B.pivots(), {}, claim);
    if (auto bad = inclusion_counterexample(B, A)) return membership_witness(*bad, A.pivots(), {}, claim);
    return nullptr;
}

/// Seeds whose normal closure under gens is [N, G].
inline std::vector<Portrait> commutator_seeds(const Subgroup& N, const std::vector<Portrait>& gens) {
    std::vector<Portrait> s;
    for (const auto& x : N.generators())
        for (const auto& g : gens) s.push_back(commutator(x, g));
    return s;
}

// --- random elements ---

class SuiteRng {
public:
    explicit SuiteRng(std::uint64_t seed) : eng_(seed) {}
    std::uint64_t next() { return eng_(); }
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(eng_() % n); }

private:
    std::mt19937_64 eng_;
};

/// Uniform random element: a random exponent on every pivot, in position order.
inline Portrait random_element(const Subgroup& H, SuiteRng& rng) {
    Portrait g = H.identity();
    for (const auto& x : H.pivots()) {
        const auto c = rng.below(H.p());
        if (c) g = compose(g, power(x, static_cast<long long>(c)));
    }
    return g;
}

inline Portrait random_word(const std::vector<Portrait>& gens, SuiteRng& rng, std::size_t max_len = 6) {
    Portrait g(gens[0].prime(), gens[0].depth());
    const std::size_t len = 1 + rng.below(max_len);
    const unsigned p = gens[0].p();
    for (std::size_t i = 0; i < len; ++i) {
        const auto& x = gens[rng.below(gens.size())];
        g = compose(g, power(x, static_cast<long long>(1 + rng.below(p - 1))));
    }
    return g;
}

// --- the normal subgroup family ---

struct FamilyMember {
    std::string label;
    Subgroup N;
};

inline std::vector<FamilyMember> normal_family(const Subgroup& Gn, const SuiteOptions& opt) {
    const auto gens = Gn.generators();
    const int n = Gn.depth();
    std::vector<FamilyMember> fam;
    auto add = [&](std::string label, Subgroup N) {
        if (fam.size() >= opt.family_cap || N.is_trivial()) return;
        for (const auto& f : fam)
            if (f.N.exponent() == N.exponent() && N.is_subgroup_of(f.N)) return;
        fam.push_back({std::move(label), std::move(N)});
    };
    for (int m = 0; m < n; ++m) add("St(" + std::to_string(m) + ")", Gn.stabilizer(m));
    {
        auto lcs = lower_central(Gn, static_cast<std::size_t>(4 * n + 4));
        for (std::size_t k = 1; k < lcs.size(); ++k) add("gamma_" + std::to_string(k + 1), lcs[k]);
        auto ds = derived_series(Gn, static_cast<std::size_t>(n + 2));
        for (std::size_t k = 1; k < ds.size(); ++k) add("derived_" + std::to_string(k), ds[k]);
    }
    for (int m = 1; m < n; ++m) {
        const FpSubspace U = Gn.image_in_Wm(m);
        if (U.dim() < 2) continue;
        // layers [U,G]^k computed from the conjugation action on level m
        const Subgroup top = Gn.stabilizer(m), bottom = Gn.stabilizer(m + 1);
        Subgroup cur = top;
        std::size_t step = std::max<std::size_t>(1, U.dim() / 3);
        for (std::size_t k = 1; k < U.dim(); ++k) {
            Subgroup next = commutator_subgroup(cur, Gn, gens).extended(bottom.pivots(), gens);
            if (next.exponent() == cur.exponent()) break;
            cur = std::move(next);
            if (k % step == 0) add("layer(" + std::to_string(m) + "," + std::to_string(cur.layer_dim(m)) + ")", cur);
        }
    }
    SuiteRng rng(opt.seed);
    std::vector<std::size_t> randoms;
    const std::size_t want_random = 6;
    for (std::size_t attempt = 0; attempt < 60 && fam.size() < opt.family_cap; ++attempt) {
        if (randoms.size() >= want_random && fam.size() >= opt.family_size) break;
        Portrait g;
        std::string label;
        if (attempt % 2 == 0) {
            g = random_word(gens, rng);
            label = "ncl(word#" + std::to_string(attempt) + ")";
        } else {
            const int k = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(std::max(1, n - 1))));
            g = random_element(Gn.stabilizer(k), rng);
            label = "ncl(St(" + std::to_string(k) + ")#" + std::to_string(attempt) + ")";
        }
        if (g.is_identity()) continue;
        const std::size_t before = fam.size();
        add(label, Subgroup::normal_closure(Gn.prime(), n, {g}, gens, Gn.limits()));
        if (fam.size() > before) randoms.push_back(fam.size() - 1);
    }
    for (std::size_t i = 0; i + 1 < randoms.size(); i += 2) {
        const auto& A = fam[randoms[i]];
        const auto& B = fam[randoms[i + 1]];
        add(A.label + "*" + B.label, A.N.extended(B.N.pivots(), gens));
    }
    return fam;
}

// --- per-family constants ---

struct Constant {
    bool ok = false;
    int value = 0;
    std::string basis;  // which statement the value comes from
    std::string reason;
};

/// K = <[a,b_2], ..., [a,b_r]>^G for Sunic groups over F_2.
inline Subgroup sunic_K(const GroupInstance& G, int depth, EngineLimits limits) {
    const auto gens = G.generators(depth);
    std::vector<Portrait> seeds;
    for (std::size_t i = 2; i < gens.size(); ++i) seeds.push_back(commutator(gens[0], gens[i]));
    return Subgroup::normal_closure(G.prime(), depth, seeds, gens, limits);
}

/// Least n >= 1 with a, b_1, ..., b_{r-1} inside phi_{2...2}(st_K(2...2)),
/// computed at depth D. Sections are taken of the image of K in G_D, which can
/// only make containment easier, so the value is a lower bound.
inline std::optional<int> sunic_nG(const GroupInstance& G, int D, EngineLimits limits) {
    if (!G.is_sunic() || G.p() != 2 || G.r_G() < 2) return std::nullopt;
    const Subgroup K = sunic_K(G, D, limits);
    for (int n = 1; D - n >= 3; ++n) {
        const Subgroup S = section_subgroup(K, Vertex::repeated(2, n));
        const auto gens = G.generators(D - n);
        bool ok = true;
        for (std::size_t i = 0; i + 1 < gens.size() && ok; ++i) ok = S.contains(gens[i]);
        if (ok) return n;
    }
    return std::nullopt;
}

inline int sunic_nG_depth() { return 7; }

/// Offset d in St_G(m+d) <= [N,G].
inline Constant csp_offset(const GroupInstance& G, EngineLimits limits) {
    Constant c;
    if (G.is_sunic()) {
        const auto& s = G.sunic();
        if (!s.regular_branch()) return {false, 0, "", "not regular branch (infinite dihedral case)"};
        if (G.p() % 2) return {true, static_cast<int>(s.r()) + 3, "Sunic, odd p: r+3", ""};
        auto nG = sunic_nG(G, sunic_nG_depth(), limits);
        if (!nG) return {false, 0, "", "n_G not determined at the available depth"};
        return {true, *nG + static_cast<int>(s.r()) + 3, "Sunic, p=2: n_G+r+3 with n_G=" + std::to_string(*nG), ""};
    }
    const BranchType t = G.branch_type();
    if (G.is_fg()) return {true, 2, "Fabrykowski-Gupta: 2", ""};
    if (G.is_ggs()) {
        if (t == BranchType::OverDerived) return {true, 3, "GGS, branch over G': 3", ""};
        if (t == BranchType::OverGamma3NotDerived) return {true, 4, "GGS, branch over gamma_3 only: 4", ""};
        return {false, 0, "", "GGS group is not regular branch"};
    }
    if (t == BranchType::OverDerived) return {true, static_cast<int>(G.r_dot()) + 3, "multi-EGS, branch over G': r_dot+3", ""};
    if (t == BranchType::OverGamma3NotDerived) return {true, 7, "multi-EGS, branch over gamma_3 only: 7", ""};
    return {false, 0, "", "branch type " + to_string(t) + " is outside the hypotheses"};
}

struct WidthBounds {
    bool ok = false;
    std::optional<int> rank;   // bound for d(N/[N,G])
    int width = 0;             // bound for log_p |N:[N,G]|
    std::optional<int> exact;  // value attained (Fabrykowski-Gupta)
    bool outside_hypothesis = false;
    std::string basis, reason;
};

inline WidthBounds width_bounds(const GroupInstance& G, EngineLimits limits) {
    WidthBounds b;
    if (G.is_sunic()) {
        const auto& s = G.sunic();
        if (!s.regular_branch()) {
            b.reason = "not regular branch";
            return b;
        }
        const int r = static_cast<int>(s.r());
        if (G.p() % 2) {
            b.ok = true;
            b.rank = b.width = r + 3;
            b.basis = "Sunic, odd p: r+3";
            return b;
        }
        auto nG = sunic_nG(G, sunic_nG_depth(), limits);
        if (!nG) {
            b.reason = "n_G not determined";
            return b;
        }
        b.ok = true;
        b.rank = b.width = r + *nG + 3;
        b.basis = "Sunic, p=2: r+n_G+3 with n_G=" + std::to_string(*nG);
        return b;
    }
    const BranchType t = G.branch_type();
    b.outside_hypothesis = G.is_torsion();
    if (G.is_fg()) {
        b.ok = true;
        b.rank = b.width = 2;
        b.exact = 2;
        b.basis = "Fabrykowski-Gupta: 2";
    } else if (G.is_ggs() && t == BranchType::OverDerived) {
        b.ok = true;
        b.rank = b.width = 3;
        b.basis = "GGS, branch over G': 3";
    } else if (G.is_ggs() && t == BranchType::OverGamma3NotDerived) {
        b.ok = true;
        b.rank = b.width = 4;
        b.basis = "GGS, branch over gamma_3 only: 4";
    } else if (t == BranchType::OverDerived) {
        b.ok = true;
        b.width = static_cast<int>(G.r_dot()) + 3;
        if (G.has_csp()) b.rank = static_cast<int>(G.r_G()) + 3;
        b.basis = "multi-EGS, branch over G': width r_dot+3, rank r_G+3 (with CSP)";
    } else if (t == BranchType::OverGamma3NotDerived) {
        b.ok = true;
        b.width = 7;
        if (G.has_csp()) b.rank = 7;
        b.basis = "multi-EGS, branch over gamma_3 only: 7";
    } else {
        b.reason = "branch type " + to_string(t) + " is outside the hypotheses";
    }
    return b;
}

/// The subgroup over which G is regular branch, in G_d.
inline std::optional<Subgroup> branching_subgroup(const GroupInstance& G, int d, EngineLimits limits) {
    const Subgroup Gd = quotient(G, d, limits);
    const auto gens = Gd.generators();
    if (G.is_sunic()) {
        if (!G.sunic().regular_branch()) return std::nullopt;
        if (G.p() % 2) return commutator_subgroup(Gd, Gd, gens);
        return sunic_K(G, d, limits);
    }
    const BranchType t = G.branch_type();
    if (t == BranchType::OverDerived) return commutator_subgroup(Gd, Gd, gens);
    if (t == BranchType::OverGamma3NotDerived) return lower_central(Gd, 3).back();
    return std::nullopt;
}

namespace detail {

inline int pick_depth(const SuiteOptions& o, const GroupInstance& G, int p3, int p5, int p7, int p2 = 6) {
    if (o.depth > 0) return o.depth;
    switch (G.p()) {
        case 2: return p2;
        case 3: return p3;
        case 5: return p5;
        default: return p7;
    }
}

inline CheckReport skipped(const std::string& name, const std::string& reason) {
    CheckReport r;
    r.name = name;
    r.status = Status::Skipped;
    r.details["reason"] = reason;
    return r;
}

/// Aggregates clause outcomes: any fail -> fail; else any pass -> pass; else skipped.
struct Clauses {
    json list = json::array();
    bool failed = false, passed = false;
    json witness = nullptr;

    void pass(const std::string& name, json info = json::object()) {
        info["clause"] = name;
        info["status"] = "pass";
        list.push_back(std::move(info));
        passed = true;
    }
    void fail(const std::string& name, json w, json info = json::object()) {
        info["clause"] = name;
        info["status"] = "fail";
        list.push_back(std::move(info));
        if (!failed) witness = std::move(w);
        failed = true;
    }
    void skip(const std::string& name, const std::string& reason) {
        json info;
        info["clause"] = name;
        info["status"] = "skipped";
        info["reason"] = reason;
        list.push_back(std::move(info));
    }
    void check(const std::string& name, bool ok, json w, json info = json::object()) {
        if (ok)
            pass(name, std::move(info));
        else
            fail(name, std::move(w), std::move(info));
    }
    void finish(CheckReport& r) const {
        r.details["clauses"] = list;
        r.status = failed ? Status::Fail : passed ? Status::Pass : Status::Skipped;
        r.witness = witness;
    }
};

}  // namespace detail

// ---------------------------------------------------------------- checks

/// St_G(m + offset) <= [N,G] over the normal family, plus the coarser
/// K' x ... x K' <= psi_{m+1}([N,G]) inclusion.
inline CheckReport verify_effective_csp(const GroupInstance& G, const SuiteOptions& opt) {
    const std::string name = "effective_csp";
    const Constant off = csp_offset(G, opt.limits);
    if (!off.ok) return detail::skipped(name, off.reason);
    const int n = detail::pick_depth(opt, G, 5, 4, 3, 7);
    if (off.value >= n) return detail::skipped(name, "offset " + std::to_string(off.value) + " leaves nothing to test at depth " + std::to_string(n));
    const Subgroup Gn = quotient(G, n, opt.limits);
    const auto gens = Gn.generators();
    const auto fam = normal_family(Gn, opt);
    CheckReport r;
    r.name = name;
    r.details["depth"] = n;
    r.details["offset"] = off.value;
    r.details["offset_basis"] = off.basis;
    r.details["family_size"] = fam.size();
    json members = json::array();
    std::size_t tested = 0;
    bool failed = false;
    for (const auto& f : fam) {
        const int m = f.N.max_stab_depth();
        json row;
        row["N"] = f.label;
        row["m"] = m;
        row["log_order"] = f.N.exponent();
        if (m + off.value >= n) {
            row["status"] = "out_of_depth";
            members.push_back(row);
            continue;
        }
        ++tested;
        const Subgroup C = commutator_subgroup(f.N, Gn, gens);
        const Subgroup S = Gn.stabilizer(m + off.value);
        row["log_commutator"] = C.exponent();
        if (auto bad = inclusion_counterexample(S, C)) {
            row["status"] = "fail";
            if (!failed) r.witness = membership_witness(*bad, commutator_seeds(f.N, gens), gens, "St(m+offset) <= [N,G]");
            failed = true;
        } else {
            row["status"] = "pass";
        }
        // coarser inclusion through the branching subgroup
        const int k = n - m - 1;
        if (k >= 2) {
            if (auto K = branching_subgroup(G, k, opt.limits)) {
                const Subgroup Kp = commutator_subgroup(*K, *K, quotient(G, k, opt.limits).generators());
                bool ok = true;
                for (std::size_t i = 0; i < tree::level_size(G.p(), m + 1) && ok; ++i) {
                    const Vertex w = Vertex::from_index(G.p(), m + 1, i);
                    for (const auto& x : Kp.pivots()) {
                        Portrait e = embed_at(x, w);
                        if (!C.contains(e)) {
                            ok = false;
                            if (!failed) r.witness = membership_witness(e, commutator_seeds(f.N, gens), gens, "K' x ... x K' <= psi_{m+1}([N,G])");
                            failed = true;
                            break;
                        }
                    }
                }
                row["branching_commutator"] = ok ? "pass" : "fail";
            }
        }
        members.push_back(row);
    }
    r.details["tested"] = tested;
    r.details["members"] = members;
    r.status = failed ? Status::Fail : tested ? Status::Pass : Status::Skipped;
    if (!tested && !failed) r.details["reason"] = "no family member has m + offset below the depth";
    return r;
}

/// gamma_3 (branch over G') or gamma_4 (branch over gamma_3 only) in every
/// coordinate at level m+1 of [N,G].
inline CheckReport verify_branching(const GroupInstance& G, const SuiteOptions& opt) {
    const std::string name = "branching";
    if (G.is_sunic()) return detail::skipped(name, "stated for multi-EGS groups");
    const BranchType t = G.branch_type();
    int term = 0;
    if (t == BranchType::OverDerived)
        term = 3;
    else if (t == BranchType::OverGamma3NotDerived)
        term = 4;
    else
        return detail::skipped(name, "branch type " + to_string(t) + " is outside the hypotheses");
    const int n = detail::pick_depth(opt, G, 5, 4, 3);
    const Subgroup Gn = quotient(G, n, opt.limits);
    const auto gens = Gn.generators();
    const auto fam = normal_family(Gn, opt);
    CheckReport r;
    r.name = name;
    r.details["depth"] = n;
    r.details["term"] = "gamma_" + std::to_string(term);
    r.details["family_size"] = fam.size();
    std::size_t tested = 0, coords = 0;
    bool failed = false;
    json members = json::array();
    for (const auto& f : fam) {
        const int m = f.N.max_stab_depth();
        const int k = n - m - 1;
        json row{{"N", f.label}, {"m", m}};
        if (k < 2) {
            row["status"] = "out_of_depth";
            members.push_back(row);
            continue;
        }
        const Subgroup Gk = quotient(G, k, opt.limits);
        const Subgroup T = lower_central(Gk, static_cast<std::size_t>(term)).back();
        if (T.is_trivial()) {
            row["status"] = "vacuous";
            members.push_back(row);
            continue;
        }
        ++tested;
        const Subgroup C = commutator_subgroup(f.N, Gn, gens);
        bool ok = true;
        for (std::size_t i = 0; i < tree::level_size(G.p(), m + 1) && ok; ++i) {
            const Vertex w = Vertex::from_index(G.p(), m + 1, i);
            for (const auto& x : T.pivots()) {
                ++coords;
                Portrait e = embed_at(x, w);
                if (!C.contains(e)) {
                    ok = false;
                    if (!failed) r.witness = membership_witness(e, commutator_seeds(f.N, gens), gens, "coordinate element in [N,G]");
                    failed = true;
                    break;
                }
            }
        }
        row["status"] = ok ? "pass" : "fail";
        members.push_back(row);
    }
    r.details["tested"] = tested;
    r.details["coordinate_elements"] = coords;
    r.details["members"] = members;
    r.status = failed ? Status::Fail : tested ? Status::Pass : Status::Skipped;
    if (!tested && !failed) r.details["reason"] = "no family member fits the depth";
    return r;
}

/// GGS groups: G'' (branch over G') or gamma_3(G)' (branch over gamma_3 only)
/// in every level-m coordinate of [N,G]; for Fabrykowski-Gupta groups also gamma_3.
inline CheckReport verify_ggs_strong(const GroupInstance& G, const SuiteOptions& opt) {
    const std::string name = "ggs_strong";
    if (!G.is_ggs()) return detail::skipped(name, "stated for GGS groups");
    const BranchType t = G.branch_type();
    if (t != BranchType::OverDerived && t != BranchType::OverGamma3NotDerived)
        return detail::skipped(name, "GGS group is not regular branch");
    const int n = detail::pick_depth(opt, G, 5, 4, 3);
    const Subgroup Gn = quotient(G, n, opt.limits);
    const auto gens = Gn.generators();
    const auto fam = normal_family(Gn, opt);
    CheckReport r;
    r.name = name;
    r.details["depth"] = n;
    r.details["term"] = t == BranchType::OverDerived ? "G''" : "gamma_3(G)'";
    r.details["family_size"] = fam.size();
    std::size_t tested = 0;
    bool failed = false;
    json members = json::array();
    for (const auto& f : fam) {
        const int m = f.N.max_stab_depth();
        const int k = n - m;
        json row{{"N", f.label}, {"m", m}};
        if (k < 2) {
            row["status"] = "out_of_depth";
            members.push_back(row);
            continue;
        }
        const Subgroup Gk = quotient(G, k, opt.limits);
        const auto gk = Gk.generators();
        const Subgroup base = t == BranchType::OverDerived ? commutator_subgroup(Gk, Gk, gk) : lower_central(Gk, 3).back();
        const Subgroup T = commutator_subgroup(base, base, gk);
        std::vector<std::pair<std::string, Subgroup>> terms{{"strong", T}};
        if (G.is_fg() && m >= 1) terms.emplace_back("fg_gamma3", lower_central(Gk, 3).back());
        const Subgroup C = commutator_subgroup(f.N, Gn, gens);
        ++tested;
        for (const auto& [label, X] : terms) {
            bool ok = true;
            for (std::size_t i = 0; i < tree::level_size(G.p(), m) && ok; ++i) {
                const Vertex w = Vertex::from_index(G.p(), m, i);
                for (const auto& x : X.pivots()) {
                    Portrait e = embed_at(x, w);
                    if (!C.contains(e)) {
                        ok = false;
                        if (!failed) r.witness = membership_witness(e, commutator_seeds(f.N, gens), gens, label + " coordinate in [N,G]");
                        failed = true;
                        break;
                    }
                }
            }
            row[label] = X.is_trivial() ? "vacuous" : ok ? "pass" : "fail";
        }
        members.push_back(row);
    }
    r.details["tested"] = tested;
    r.details["members"] = members;
    r.status = failed ? Status::Fail : tested ? Status::Pass : Status::Skipped;
    return r;
}

/// Fabrykowski-Gupta groups: G^(m) = St(m) = psi_{m-1}^{-1}(G' x ... x G'),
/// and the coordinate description of sections of St(m) modulo St(2).
inline CheckReport verify_fg_lemma(const GroupInstance& G, const SuiteOptions& opt) {
    const std::string name = "fg_lemma";
    if (!G.is_fg()) return detail::skipped(name, "stated for Fabrykowski-Gupta groups");
    const int n = detail::pick_depth(opt, G, 4, 4, 3);
    const unsigned p = G.p();
    const Subgroup Gn = quotient(G, n, opt.limits);
    const auto gens = Gn.generators();
    CheckReport r;
    r.name = name;
    r.details["depth"] = n;
    detail::Clauses cl;
    const auto ds = derived_series(Gn, static_cast<std::size_t>(n + 1));
    for (int m = 2; m < n; ++m) {
        const Subgroup St = Gn.stabilizer(m);
        if (static_cast<std::size_t>(m) < ds.size()) {
            const Subgroup& D = ds[static_cast<std::size_t>(m)];
            const bool eq = D == St;
            json w = nullptr;
            if (!eq) w = equality_witness(St, D, "derived term equals St(m)");
            cl.check("derived_" + std::to_string(m) + "=St(" + std::to_string(m) + ")", eq, w,
                     {{"log_derived", D.exponent()}, {"log_St", St.exponent()}});
        }
        const int k = n - m + 1;
        const Subgroup Gk = quotient(G, k, opt.limits);
        const Subgroup prod = coordinate_product(commutator_subgroup(Gk, Gk, Gk.generators()), m - 1);
        const bool eq = prod == St;
        json w = nullptr;
        if (!eq) w = equality_witness(St, prod, "St(m) equals psi^-1(G' x ... x G')");
        cl.check("St(" + std::to_string(m) + ")=psi^-1(G'^" + std::to_string(tree::level_size(p, m - 1)) + ")", eq, w);
    }
    // part (b)
    SuiteRng rng(opt.seed);
    std::size_t tested = 0, searched = 0;
    bool allfound = true;
    json found_b = nullptr;
    json wit = nullptr;
    for (int m = 1; n - m + 1 >= 3; ++m) {
        const int k = n - m + 1;
        const Subgroup Gk = quotient(G, k, opt.limits);
        std::vector<Portrait> samples;
        if (m == 1) samples.push_back(gens[1]);
        const Subgroup St = Gn.stabilizer(m);
        for (std::size_t s = 0; s < opt.samples; ++s) samples.push_back(random_element(St, rng));
        for (std::size_t si = 0; si < samples.size(); ++si) {
            const auto& g = samples[si];
            for (std::size_t vi = 0; vi < tree::level_size(p, m - 1); ++vi) {
                const Vertex v = Vertex::from_index(p, m - 1, vi);
                const Portrait x = section(g, v);
                const Portrait xi = inverse(x);
                ++tested;
                std::vector<unsigned> ell(p, 0);
                bool found = false;
                const Portrait sa = G.generator(0, k - 1), sb = G.generator(1, k - 1);
                while (!found) {
                    ++searched;
                    std::vector<Portrait> secs;
                    for (unsigned i = 0; i < p; ++i) secs.push_back(compose(power(sa, ell[i]), power(sb, ell[(i + 1) % p])));
                    const Portrait y = assemble(0, secs);
                    if (in_stab(compose(xi, y), 2) && Gk.contains(y)) {
                        found = true;
                        if (m == 1 && si == 0) found_b = ell;
                        break;
                    }
                    std::size_t q = 0;
                    while (q < p && ++ell[q] == p) ell[q++] = 0;
                    if (q == p) break;
                }
                if (!found) {
                    allfound = false;
                    if (wit.is_null()) {
                        wit = json::object();
                        wit["kind"] = "coordinate_link";
                        wit["p"] = p;
                        wit["depth"] = k;
                        wit["element"] = x.digits();
                        wit["generators"] = portraits_json(Gk.generators());
                        wit["section_a"] = sa.digits();
                        wit["section_b"] = sb.digits();
                    }
                }
            }
        }
    }
    if (tested)
        cl.check("coordinate_link", allfound, wit, {{"sections_tested", tested}, {"candidates_searched", searched}, {"ell_for_b", found_b}});
    else
        cl.skip("coordinate_link", "depth too small for k >= 3");
    cl.finish(r);
    return r;
}

/// Uniserial chain between St(m+1) and St(m), closed forms for t(m), R_m and
/// an exhaustive comparison with all normal subgroups in between.
inline CheckReport verify_chain_theorem(const GroupInstance& G, const SuiteOptions& opt) {
    const std::string name = "chain";
    bool hyp = false;
    if (G.is_sunic())
        hyp = G.sunic().regular_branch();
    else
        for (const auto& v : G.egs().families[0]) hyp = hyp || entry_sum(v, G.p()) != 0;
    if (!hyp) return detail::skipped(name, "no directed generator along the rightmost path with non-zero entry sum");
    const int n = detail::pick_depth(opt, G, 4, 3, 3, 5);
    const unsigned p = G.p();
    const Subgroup Gn = quotient(G, n, opt.limits);
    const auto gens = Gn.generators();
    CheckReport r;
    r.name = name;
    r.details["depth"] = n;
    detail::Clauses cl;
    std::vector<int> levels;
    if (opt.level) {
        if (*opt.level < 1 || *opt.level >= n) return detail::skipped(name, "level must satisfy 1 <= m < depth");
        levels.push_back(*opt.level);
    } else {
        for (int m = 1; m < n; ++m) levels.push_back(m);
    }
    std::vector<std::size_t> t(static_cast<std::size_t>(n), 0);
    for (int m = 0; m < n; ++m) t[static_cast<std::size_t>(m)] = Gn.layer_dim(m);
    json tv = json::array();
    for (auto x : t) tv.push_back(x);
    r.details["t"] = tv;
    const bool closed = !G.is_sunic() && G.is_ggs() && !G.is_torsion() && G.branch_type() == BranchType::OverDerived;
    const bool nt_derived = !G.is_sunic() && !G.is_torsion() && G.branch_type() == BranchType::OverDerived;
    for (int m : levels) {
        const std::string tag = "m=" + std::to_string(m);
        const std::size_t tm = t[static_cast<std::size_t>(m)];
        const FpSubspace U = Gn.image_in_Wm(m);
        const GModule W = wm_module(G, m);
        const auto chain = uniserial_chain(U, W);
        json w = nullptr;
        if (!chain.uniserial) {
            w = json::object();
            w["kind"] = "module_layer";
            w["p"] = p;
            w["level"] = m;
            w["layer"] = subspace_json(chain.layers[*chain.witness_layer]);
        }
        cl.check("uniserial " + tag, chain.uniserial, w, {{"t", tm}, {"layers", chain.layers.size()}});
        const RmResult R = compute_Rm(Gn, m);
        cl.check("image_is_V_j " + tag, R.matches_chain, R.matches_chain ? json(nullptr) : json{{"kind", "module_layer"}, {"p", p}, {"level", m}, {"layer", subspace_json(R.image)}},
                 {{"top", tuple_str(R.top)}, {"R_size", R.t}});
        // preimages of the layers are normal and increase by p each step
        if (chain.uniserial) {
            const Subgroup top = Gn.stabilizer(m), bottom = Gn.stabilizer(m + 1);
            bool ok = true;
            json w2 = nullptr;
            std::size_t prev = bottom.exponent() + tm;
            for (const auto& L : chain.layers) {
                std::vector<Portrait> seeds;
                for (const auto& v : L.basis()) seeds.push_back(top.pullback(v, m));
                const Subgroup N = bottom.extended(seeds, gens);
                const bool good = N.exponent() == bottom.exponent() + L.dim() && N.is_normalized_by(gens) && N.exponent() == prev;
                --prev;
                if (!good && ok) {
                    ok = false;
                    w2 = json{{"kind", "module_layer"}, {"p", p}, {"level", m}, {"layer", subspace_json(L)}};
                }
            }
            cl.check("normal_preimages " + tag, ok, w2);
        }
        if (tm <= opt.oracle_cap_t) {
            const auto brute = oracle::brute_normal_between(Gn, m, opt.oracle_cap_t);
            std::vector<std::string> a, b;
            for (const auto& S : brute.images) a.push_back(S.key());
            for (const auto& L : chain.layers) b.push_back(L.key());
            b.push_back(FpSubspace(p, U.ambient()).key());
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            cl.check("brute_normal_between " + tag, a == b && brute.all_normal, nullptr, {{"normal_subgroups", brute.images.size()}});
        } else {
            cl.skip("brute_normal_between " + tag, "t(m) above the oracle cap");
        }
        if (closed) {
            const std::size_t expect = m == 1 ? p : (p - 1) * tree::ipow(p, m - 1);
            cl.check("closed_form " + tag, tm == expect, nullptr, {{"t", tm}, {"expected", expect}});
        }
        if (nt_derived) {
            const std::size_t lower = (p - 1) * tree::ipow(p, m - 1);
            cl.check("lower_bound " + tag, tm >= lower, nullptr, {{"t", tm}, {"bound", lower}});
        }
        if (G.is_sunic()) {
            const int rr = static_cast<int>(G.sunic().r());
            if (m <= rr)
                cl.check("R_m_full " + tag, tm == tree::ipow(p, m), nullptr, {{"t", tm}});
            else
                cl.check("R_m_lower " + tag, tm >= (p - 1) * tree::ipow(p, m - 1), nullptr, {{"t", tm}});
        }
        if (!G.is_sunic()) {
            if (m >= 2) {
                const std::size_t prevt = t[static_cast<std::size_t>(m - 1)];
                cl.check("t(m)<=p*t(m-1) " + tag, tm <= p * prevt, nullptr, {{"t", tm}, {"t_prev", prevt}});
            }
            if (m + 1 < n) {
                const std::size_t nextt = t[static_cast<std::size_t>(m + 1)];
                cl.check("t(m)<=p*t(m+1) " + tag, tm <= p * nextt, nullptr, {{"t", tm}, {"t_next", nextt}});
            } else {
                cl.skip("t(m)<=p*t(m+1) " + tag, "t(m+1) needs depth m+2");
            }
        }
    }
    cl.finish(r);
    r.one_sided = false;
    return r;
}

/// log_p |N:[N,G]| and d(N/[N,G]) against the family bound; lower central layers.
inline CheckReport verify_width_and_rank(const GroupInstance& G, const SuiteOptions& opt) {
    const std::string name = "width_rank";
    const WidthBounds b = width_bounds(G, opt.limits);
    if (!b.ok) return detail::skipped(name, b.reason);
    const int n = detail::pick_depth(opt, G, 4, 3, 3, 6);
    const Subgroup Gn = quotient(G, n, opt.limits);
    const auto gens = Gn.generators();
    const auto fam = normal_family(Gn, opt);
    CheckReport r;
    r.name = name;
    r.details["depth"] = n;
    r.details["bound_basis"] = b.basis;
    r.details["width_bound"] = b.width;
    r.details["rank_bound"] = b.rank ? json(*b.rank) : json(nullptr);
    r.details["outside_hypothesis"] = b.outside_hypothesis;
    r.details["family_size"] = fam.size();
    bool failed = false;
    int maxw = 0, maxd = 0;
    json members = json::array();
    for (const auto& f : fam) {
        const Subgroup C = commutator_subgroup(f.N, Gn, gens);
        std::vector<Portrait> pw;
        for (const auto& x : f.N.generators()) pw.push_back(power(x, G.p()));
        const Subgroup CP = C.extended(pw, gens);
        const int w = static_cast<int>(f.N.exponent() - C.exponent());
        const int d = static_cast<int>(f.N.exponent() - CP.exponent());
        maxw = std::max(maxw, w);
        maxd = std::max(maxd, d);
        const bool ok = w <= b.width && (!b.rank || d <= *b.rank);
        members.push_back({{"N", f.label}, {"width", w}, {"normal_rank", d}, {"status", ok ? "pass" : "fail"}});
        if (!ok && !failed) {
            failed = true;
            r.witness = json{{"kind", "width"}, {"p", G.p()}, {"depth", n}, {"N_generators", portraits_json(f.N.generators())}, {"width", w}, {"normal_rank", d}};
        }
    }
    const auto lcs = lower_central(Gn, static_cast<std::size_t>(8 * n));
    json layers = json::array();
    for (std::size_t k = 0; k + 1 < lcs.size(); ++k) {
        const int dk = static_cast<int>(lcs[k].exponent() - lcs[k + 1].exponent());
        layers.push_back(dk);
        if (dk > b.width && !failed) {
            failed = true;
            r.witness = json{{"kind", "lower_central_layer"}, {"p", G.p()}, {"depth", n}, {"k", k + 1}, {"dim", dk}};
        }
    }
    r.details["lower_central_layers"] = layers;
    r.details["max_width"] = maxw;
    r.details["max_normal_rank"] = maxd;
    if (b.exact) {
        const Subgroup C = commutator_subgroup(Gn, Gn, gens);
        const int wg = static_cast<int>(Gn.exponent() - C.exponent());
        r.details["width_of_G"] = wg;
        if (wg != *b.exact && !failed) {
            failed = true;
            r.witness = json{{"kind", "width"}, {"p", G.p()}, {"depth", n}, {"N", "G_n"}, {"width", wg}};
        }
    }
    r.details["members"] = members;
    r.status = failed ? Status::Fail : Status::Pass;
    return r;
}

/// G St(n) = H St(n) for the multi-GGS group H on the concatenated system.
inline CheckReport verify_congruence_equiv(const GroupInstance& G, const SuiteOptions& opt) {
    const std::string name = "congruence_equiv";
    if (G.is_sunic()) return detail::skipped(name, "stated for multi-EGS groups");
    if (G.branch_type() != BranchType::OverDerived) return detail::skipped(name, "group is not regular branch over G'");
    const int n = detail::pick_depth(opt, G, 4, 3, 3);
    const GroupInstance H = concatenated_multi_ggs(G.egs());
    CheckReport r;
    r.name = name;
    r.details["depth"] = n;
    r.details["multi_ggs_generators"] = H.r_G();
    r.details["concatenation_independent"] = H.r_G() == G.r_G();
    detail::Clauses cl;
    for (int d = 1; d <= n; ++d) {
        const Subgroup Gd = quotient(G, d, opt.limits), Hd = quotient(H, d, opt.limits);
        json w = nullptr;
        bool ok = true;
        for (const auto& x : Gd.generators())
            if (!Hd.contains(x)) {
                ok = false;
                w = membership_witness(x, Hd.generators(), {}, "G generator in H St(n)");
                break;
            }
        if (ok)
            for (const auto& x : Hd.generators())
                if (!Gd.contains(x)) {
                    ok = false;
                    w = membership_witness(x, Gd.generators(), {}, "H generator in G St(n)");
                    break;
                }
        cl.check("depth " + std::to_string(d), ok, w, {{"log_order_G", Gd.exponent()}, {"log_order_H", Hd.exponent()}});
    }
    cl.finish(r);
    r.one_sided = false;
    return r;
}

/// B = D gamma_3(G): regular branch over B, St(5) <= B <= gamma_3 St(k); d(G_3) = 3.
inline CheckReport verify_appB(const GroupInstance& G, const SuiteOptions& opt) {
    const std::string name = "appb";
    if (!appB_shape(G)) return detail::skipped(name, "group does not share one symmetric non-constant vector over 2..p single-vector families");
    const int n = opt.depth > 0 ? opt.depth : 4;
    const auto words = appB_D_generators(G);
    CheckReport r;
    r.name = name;
    r.details["depth"] = n;
    r.details["D_words"] = words.size();
    detail::Clauses cl;
    auto build_B = [&](int d) {
        const Subgroup Gd = quotient(G, d, opt.limits);
        const auto gd = Gd.generators();
        std::vector<Portrait> seeds;
        for (const auto& w : words) seeds.push_back(evaluate(w, gd));
        const Subgroup g3 = lower_central(Gd, 3).back();
        return g3.extended(seeds, gd);
    };
    try {
        const Subgroup Bn = build_B(n), Bs = build_B(n - 1);
        auto bad = regular_branch_witness(Bn, Bs);
        cl.check("regular_branch_over_B", !bad, bad ? membership_witness(*bad, Bn.pivots(), {}, "one-coordinate element of B x 1 x ... x 1 in B") : json(nullptr),
                 {{"log_B", Bn.exponent()}});
        const Subgroup Gn = quotient(G, n, opt.limits);
        const Subgroup g3 = lower_central(Gn, 3).back();
        for (int k = 1; k < n; ++k) {
            const Subgroup upper = g3.extended(Gn.stabilizer(k).pivots(), Gn.generators());
            auto b2 = inclusion_counterexample(Bn, upper);
            cl.check("B<=gamma_3 St(" + std::to_string(k) + ")", !b2, b2 ? membership_witness(*b2, upper.pivots(), {}, "B <= gamma_3 St(k)") : json(nullptr));
        }
        if (n >= 6) {
            auto b3 = inclusion_counterexample(Gn.stabilizer(5), Bn);
            cl.check("St(5)<=B", !b3, b3 ? membership_witness(*b3, Bn.pivots(), {}, "St(5) <= B") : json(nullptr));
        } else {
            cl.skip("St(5)<=B", "needs depth >= 6");
        }
    } catch (const ResourceExceeded& e) {
        cl.skip("appb_depth_" + std::to_string(n), std::string("resource guard: ") + e.what());
        r.resource_guard = true;
    }
    const Subgroup G3 = quotient(G, 3, opt.limits);
    const std::size_t d3 = min_generators(G3);
    cl.check("min_generators(G_3)=3", d3 == 3, nullptr, {{"value", d3}});
    cl.finish(r);
    return r;
}

/// Appendix statements for Sunic groups.
inline CheckReport verify_sunic_suite(const GroupInstance& G, const SuiteOptions& opt) {
    const std::string name = "sunic";
    if (!G.is_sunic()) return detail::skipped(name, "not a Sunic group");
    const auto& s = G.sunic();
    if (!s.regular_branch()) return detail::skipped(name, "p=2 with r=1 gives the infinite dihedral group, which is not regular branch");
    const unsigned p = G.p();
    const int rr = static_cast<int>(s.r());
    const int n = detail::pick_depth(opt, G, 4, 3, 3, 6);
    CheckReport r;
    r.name = name;
    r.details["depth"] = n;
    detail::Clauses cl;
    const Subgroup Gn = quotient(G, n, opt.limits);
    const auto gens = Gn.generators();
    auto K_at = [&](int d) { return *branching_subgroup(G, d, opt.limits); };
    {
        const Subgroup Kn = K_at(n), Ks = K_at(n - 1);
        auto bad = regular_branch_witness(Kn, Ks);
        cl.check(p % 2 ? "regular_branch_over_G'" : "regular_branch_over_K", !bad,
                 bad ? membership_witness(*bad, Kn.pivots(), {}, "K x 1 x ... x 1 in K") : json(nullptr), {{"log_K", Kn.exponent()}});
    }
    const int ssf = std::min(n, 4);
    cl.check("super_strongly_fractal_to_depth_" + std::to_string(ssf), is_super_strongly_fractal(G, ssf, opt.limits), nullptr);
    std::optional<int> nG;
    if (p == 2) {
        const bool ok = section_subgroup(Gn.stabilizer(2), Vertex::parse("22")) == quotient(G, n - 2, opt.limits);
        cl.check("phi_22(St(2))=G", ok, nullptr);
        nG = sunic_nG(G, sunic_nG_depth(), opt.limits);
        if (nG)
            cl.pass("n_G", {{"value", *nG}, {"computed_at_depth", sunic_nG_depth()}});
        else
            cl.skip("n_G", "no n found at the available depth");
    } else {
        cl.check("psi(G')_subdirect", is_subdirect_psi_derived(G, n, opt.limits), nullptr);
    }
    // St(r+3) <= G'' (odd p) or St(r+n_G+2) <= K' (p = 2)
    {
        const int lvl = p % 2 ? rr + 3 : (nG ? rr + *nG + 2 : -1);
        const std::string label = p % 2 ? "St(r+3)<=G''" : "St(r+n_G+2)<=K'";
        if (lvl < 0)
            cl.skip(label, "n_G unknown");
        else if (lvl >= n)
            cl.skip(label, "needs depth > " + std::to_string(lvl));
        else {
            const Subgroup K = p % 2 ? commutator_subgroup(Gn, Gn, gens) : K_at(n);
            const Subgroup Kp = commutator_subgroup(K, K, gens);
            auto bad = inclusion_counterexample(Gn.stabilizer(lvl), Kp);
            cl.check(label, !bad, bad ? membership_witness(*bad, Kp.pivots(), {}, label) : json(nullptr));
        }
    }
    for (int m = 1; m < n; ++m) {
        const std::size_t tm = Gn.layer_dim(m);
        if (m <= rr)
            cl.check("R_" + std::to_string(m) + "=J_" + std::to_string(m), tm == tree::ipow(p, m), nullptr, {{"t", tm}});
        else
            cl.check("R_" + std::to_string(m) + " contains (p-1)p^(m-1) tuples", tm >= (p - 1) * tree::ipow(p, m - 1), nullptr, {{"t", tm}});
        const RmResult R = compute_Rm(Gn, m);
        cl.check("image_is_V_j m=" + std::to_string(m), R.matches_chain, nullptr, {{"top", tuple_str(R.top)}});
    }
    cl.finish(r);
    return r;
}

/// Different abelianization ranks of the congruence quotients.
inline CheckReport verify_profinite_distinction(const GroupInstance& G, const GroupInstance& H, const SuiteOptions& opt) {
    const std::string name = "profinite";
    for (const GroupInstance* X : {&G, &H}) {
        if (X->is_sunic() || X->branch_type() != BranchType::OverDerived || !X->has_csp())
            return detail::skipped(name, "both groups must be multi-EGS, regular branch over G', with the congruence subgroup property");
    }
    if (G.p() != H.p()) return detail::skipped(name, "groups act on different trees");
    const int n = std::max<int>({opt.depth, static_cast<int>(G.r_dot()) + 1, static_cast<int>(H.r_dot()) + 1});
    const std::size_t dG = min_generators(quotient(G, n, opt.limits));
    const std::size_t dH = min_generators(quotient(H, n, opt.limits));
    CheckReport r;
    r.name = name;
    r.details["depth"] = n;
    r.details["r_G"] = G.r_G();
    r.details["r_H"] = H.r_G();
    r.details["d_G"] = dG;
    r.details["d_H"] = dH;
    r.status = dG != dH ? Status::Pass : Status::Fail;
    if (dG == dH) r.witness = json{{"kind", "equal_ranks"}, {"d", dG}};
    r.one_sided = false;
    return r;
}

/// Subgroup identities: branch structure, St(2) <= gamma_3, St(2) = St(1)' =
/// psi^-1(G' x ... x G'), St(r_G+1) <= G', fractalness, subdirectness.
inline CheckReport verify_structure(const GroupInstance& G, const SuiteOptions& opt) {
    const std::string name = "structure";
    if (G.is_sunic()) return detail::skipped(name, "Sunic groups are covered by the sunic check");
    const BranchType t = G.branch_type();
    const int n = detail::pick_depth(opt, G, 4, 3, 3);
    const unsigned p = G.p();
    const Subgroup Gn = quotient(G, n, opt.limits);
    const auto gens = Gn.generators();
    const Subgroup D = commutator_subgroup(Gn, Gn, gens);
    const Subgroup g3 = lower_central(Gn, 3).back();
    CheckReport r;
    r.name = name;
    r.details["depth"] = n;
    r.details["branch_type"] = to_string(t);
    detail::Clauses cl;
    auto eq_clause = [&](const std::string& label, const Subgroup& A, const Subgroup& B) {
        const json w = equality_witness(A, B, label);
        cl.check(label, w.is_null(), w, {{"log_left", A.exponent()}, {"log_right", B.exponent()}});
    };
    auto sub_clause = [&](const std::string& label, const Subgroup& A, const Subgroup& B) {
        auto bad = inclusion_counterexample(A, B);
        cl.check(label, !bad, bad ? membership_witness(*bad, B.pivots(), {}, label) : json(nullptr));
    };
    auto branch_over = [&](bool derived) {
        const Subgroup Gs = quotient(G, n - 1, opt.limits);
        const Subgroup Ks = derived ? commutator_subgroup(Gs, Gs, Gs.generators()) : lower_central(Gs, 3).back();
        return regular_branch_witness(derived ? D : g3, Ks);
    };
    if (t == BranchType::OverDerived) {
        auto bad = branch_over(true);
        cl.check("regular_branch_over_G'", !bad, bad ? membership_witness(*bad, D.pivots(), {}, "G' x 1 x ... x 1 in G'") : json(nullptr));
        cl.check("psi(G')_subdirect", is_subdirect_psi_derived(G, n, opt.limits), nullptr);
    } else if (t == BranchType::OverGamma3NotDerived) {
        auto bad = branch_over(false);
        cl.check("regular_branch_over_gamma_3", !bad, bad ? membership_witness(*bad, g3.pivots(), {}, "gamma_3 x 1 x ... x 1 in gamma_3") : json(nullptr));
        // failure at finite depth proves the negative statement
        const bool not_derived = branch_over(true).has_value();
        if (not_derived)
            cl.pass("not_regular_branch_over_G'");
        else
            cl.skip("not_regular_branch_over_G'", "no obstruction visible at this depth");
    }
    if (t == BranchType::OverDerived || t == BranchType::OverGamma3NotDerived) {
        const int ssf = std::min(n, p == 3 ? 4 : 3);
        cl.check("super_strongly_fractal_to_depth_" + std::to_string(ssf), is_super_strongly_fractal(G, ssf, opt.limits), nullptr);
    }
    if (G.is_ggs()) sub_clause("St(2)<=gamma_3", Gn.stabilizer(2), g3);
    if (G.is_ggs() && !G.is_torsion() && t == BranchType::OverDerived) {
        const Subgroup St1 = Gn.stabilizer(1), St2 = Gn.stabilizer(2);
        eq_clause("St(2)=St(1)'", St2, commutator_subgroup(St1, St1, gens));
        const Subgroup Gs = quotient(G, n - 1, opt.limits);
        eq_clause("St(2)=psi^-1(G'^p)", St2, coordinate_product(commutator_subgroup(Gs, Gs, Gs.generators()), 1));
    }
    if (t == BranchType::OverDerived && G.r_dot() == G.r_G()) {
        const int lvl = static_cast<int>(G.r_G()) + 1;
        if (lvl < n)
            sub_clause("St(r_G+1)<=G'", Gn.stabilizer(lvl), D);
        else
            cl.skip("St(r_G+1)<=G'", "needs depth > r_G+1");
    }
    (void)p;
    cl.finish(r);
    return r;
}

/// d(G/St(n)) = 1 + r_dot for groups branching over G' (n >= r_dot+1); 2 for
/// GGS groups branching over gamma_3 only.
inline CheckReport verify_generators(const GroupInstance& G, const SuiteOptions& opt) {
    const std::string name = "generators";
    if (G.is_sunic()) return detail::skipped(name, "stated for multi-EGS groups");
    const BranchType t = G.branch_type();
    CheckReport r;
    r.name = name;
    detail::Clauses cl;
    if (t == BranchType::OverDerived) {
        const int n0 = static_cast<int>(G.r_dot()) + 1;
        const int n1 = std::max(n0, opt.depth);
        for (int n = n0; n <= n1; ++n) {
            const std::size_t d = min_generators(quotient(G, n, opt.limits));
            cl.check("d(G_" + std::to_string(n) + ")=1+r_dot", d == 1 + G.r_dot(), nullptr, {{"value", d}, {"expected", 1 + G.r_dot()}});
        }
    } else if (t == BranchType::OverGamma3NotDerived && G.is_ggs()) {
        const int n = std::max(3, opt.depth);
        const std::size_t d = min_generators(quotient(G, n, opt.limits));
        cl.check("d(G_" + std::to_string(n) + ")=2", d == 2, nullptr, {{"value", d}});
    } else {
        return detail::skipped(name, "branch type " + to_string(t) + " has no stated generator count");
    }
    cl.finish(r);
    return r;
}

// ---------------------------------------------------------------- dispatch

inline const std::vector<std::string>& check_names() {
    static const std::vector<std::string> names{"appb",   "branching", "chain",   "congruence_equiv", "effective_csp", "fg_lemma",
                                                "generators", "ggs_strong", "profinite", "structure", "sunic", "width_rank"};
    return names;
}

inline CheckReport run_check(const std::string& name, const GroupInstance& G, const SuiteOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckReport r;
    try {
        if (name == "effective_csp")
            r = verify_effective_csp(G, opt);
        else if (name == "branching")
            r = verify_branching(G, opt);
        else if (name == "ggs_strong")
            r = verify_ggs_strong(G, opt);
        else if (name == "fg_lemma")
            r = verify_fg_lemma(G, opt);
        else if (name == "chain")
            r = verify_chain_theorem(G, opt);
        else if (name == "width_rank")
            r = verify_width_and_rank(G, opt);
        else if (name == "congruence_equiv")
            r = verify_congruence_equiv(G, opt);
        else if (name == "appb")
            r = verify_appB(G, opt);
        else if (name == "sunic")
            r = verify_sunic_suite(G, opt);
        else if (name == "structure")
            r = verify_structure(G, opt);
        else if (name == "generators")
            r = verify_generators(G, opt);
        else if (name == "profinite") {
            if (!opt.other)
                r = detail::skipped(name, "needs a second group");
            else
                r = verify_profinite_distinction(G, *opt.other, opt);
        } else
            throw std::invalid_argument("unknown check '" + name + "'");
    } catch (const ResourceExceeded& e) {
        r = detail::skipped(name, std::string("resource guard: ") + e.what());
        r.resource_guard = true;
    }
    const auto t1 = std::chrono::steady_clock::now();
    r.millis = opt.timing ? std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count() : 0;
    return r;
}

/// Runs the named checks on a pool of `jobs` threads; results come back sorted by name.
inline std::vector<CheckReport> run_checks(const std::vector<std::string>& names, const GroupInstance& G, const SuiteOptions& opt,
                                           unsigned jobs = 1) {
    std::vector<CheckReport> out(names.size());
    std::size_t next = 0;
    std::mutex mu;
    std::exception_ptr err;
    auto worker = [&] {
        while (true) {
            std::size_t i;
            {
                std::lock_guard<std::mutex> lk(mu);
                if (next >= names.size() || err) return;
                i = next++;
            }
            try {
                out[i] = run_check(names[i], G, opt);
            } catch (...) {
                std::lock_guard<std::mutex> lk(mu);
                if (!err) err = std::current_exception();
            }
        }
    };
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(names.size())));
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < jobs; ++k) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
    std::sort(out.begin(), out.end(), [](const CheckReport& a, const CheckReport& b) { return a.name < b.name; });
    return out;
}

/// Re-checks a serialized witness: returns true when the failure is confirmed.
inline bool replay_witness(const json& w) {
    const std::string kind = w.at("kind").get<std::string>();
    const Prime p(w.at("p").get<unsigned>());
    const int depth = w.at("depth").get<int>();
    auto load = [&](const json& a, int d) {
        std::vector<Portrait> v;
        for (const auto& s : a) v.push_back(Portrait::from_digits(p, d, s.get<std::string>()));
        return v;
    };
    if (kind == "membership") {
        const Portrait e = Portrait::from_digits(p, depth, w.at("element").get<std::string>());
        const auto seeds = load(w.at("seeds"), depth);
        const auto norms = load(w.at("normalizers"), depth);
        const Subgroup H = norms.empty() ? Subgroup::generate(p, depth, seeds) : Subgroup::normal_closure(p, depth, seeds, norms);
        return H.contains(e) != w.value("expected_member", true);
    }
    if (kind == "coordinate_link") {
        // no l in F_p^p with psi^-1(a^l_1 b^l_2, ..., a^l_p b^l_1) in G and congruent to x mod St(2)
        const Portrait xi = inverse(Portrait::from_digits(p, depth, w.at("element").get<std::string>()));
        const Subgroup Gk = Subgroup::generate(p, depth, load(w.at("generators"), depth));
        const Portrait sa = Portrait::from_digits(p, depth - 1, w.at("section_a").get<std::string>());
        const Portrait sb = Portrait::from_digits(p, depth - 1, w.at("section_b").get<std::string>());
        const unsigned q = p.value();
        std::vector<unsigned> ell(q, 0);
        while (true) {
            std::vector<Portrait> secs;
            for (unsigned i = 0; i < q; ++i) secs.push_back(compose(power(sa, ell[i]), power(sb, ell[(i + 1) % q])));
            const Portrait y = assemble(0, secs);
            if (in_stab(compose(xi, y), 2) && Gk.contains(y)) return false;
            std::size_t i = 0;
            while (i < q && ++ell[i] == q) ell[i++] = 0;
            if (i == q) return true;
        }
    }
    throw std::invalid_argument("unknown witness kind '" + kind + "'");
}

}  // namespace treegrp
