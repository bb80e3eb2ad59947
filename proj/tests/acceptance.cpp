// Acceptance run: one PASS/FAIL line per criterion; exit status 0 only if all pass.
#include <chrono>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include <treegrp/fpg_modules.hpp>
#include <treegrp/oracle.hpp>
#include <treegrp/theorem_suite.hpp>

using namespace treegrp;

namespace {

MultiEGSSpec spec(unsigned p, std::vector<std::pair<unsigned, DefiningVector>> fams) {
    MultiEGSSpec s{p, std::vector<std::vector<DefiningVector>>(p)};
    for (auto& [j, v] : fams) s.families[j - 1].push_back(v);
    return s;
}

GroupInstance remark_group() { return make_multi_egs(spec(5, {{1, {1, 0, 0, 0}}, {5, {1, 1, 0, 0}}})); }

// Collects sub-results; the criterion passes only if every expectation holds.
struct Ledger {
    bool ok = true;
    std::ostringstream notes;
    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            notes << "  - failed: " << what << "\n";
        }
    }
    void note(const std::string& s) { notes << "  - " << s << "\n"; }
};

std::string tuple_list(const std::vector<IndexTuple>& v) {
    std::string s;
    for (const auto& j : v) s += (s.empty() ? "" : " ") + tuple_str(j);
    return s;
}

// closed form for non-torsion GGS groups branching over G'
std::size_t closed_t(unsigned p, int m) { return m == 1 ? p : (p - 1) * tree::ipow(p, m - 1); }

void criterion1(Ledger& L) {
    const Subgroup F = quotient(make_fg(3), 4);
    for (int m = 1; m <= 3; ++m) {
        L.expect(F.layer_dim(m) == closed_t(3, m), "FG p=3 t(" + std::to_string(m) + ") = " + std::to_string(F.layer_dim(m)));
        L.expect(F.image_in_Wm(m).dim() == F.layer_dim(m), "FG p=3 image dimension at level " + std::to_string(m));
    }
    const Subgroup G = quotient(make_ggs(5, {1, 0, 0, 0}), 3);
    for (int m = 1; m <= 2; ++m) L.expect(G.layer_dim(m) == closed_t(5, m), "GGS p=5 t(" + std::to_string(m) + ") = " + std::to_string(G.layer_dim(m)));
    L.note("FG p=3: t = " + std::to_string(F.layer_dim(1)) + "," + std::to_string(F.layer_dim(2)) + "," + std::to_string(F.layer_dim(3)) +
           "; GGS p=5: t = " + std::to_string(G.layer_dim(1)) + "," + std::to_string(G.layer_dim(2)));
}

void chain_for(Ledger& L, const GroupInstance& G, int depth, int max_m) {
    const Subgroup Gn = quotient(G, depth);
    for (int m = 1; m <= max_m; ++m) {
        const FpSubspace U = Gn.image_in_Wm(m);
        const auto ch = uniserial_chain(U, wm_module(G, m));
        const std::string tag = "p=" + std::to_string(G.p()) + " m=" + std::to_string(m);
        L.expect(ch.uniserial && ch.layers.size() == U.dim(), tag + " uniserial chain with index-p layers");
        if (U.dim() > 6) continue;
        const auto nb = oracle::brute_normal_between(Gn, m);
        std::vector<std::string> a, b;
        for (const auto& I : nb.images) a.push_back(I.key());
        for (const auto& C : ch.layers) b.push_back(C.key());
        b.push_back(FpSubspace(G.p(), U.ambient()).key());
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        L.expect(nb.all_normal && a == b, tag + " brute-force normal subgroups equal the chain");
        L.note(tag + ": " + std::to_string(nb.subgroups.size()) + " normal subgroups between St(m+1) and St(m)");
    }
}

void criterion2(Ledger& L) {
    chain_for(L, make_fg(3), 4, 3);
    chain_for(L, make_ggs(5, {1, 0, 0, 0}), 3, 2);
}

void criterion3(Ledger& L) {
    const auto subs = oracle::brute_submodules(wm_module(make_fg(3), 2));
    L.expect(subs.size() == 9, "9 nonzero submodules (found " + std::to_string(subs.size()) + ")");
    L.expect(oracle::totally_ordered(subs), "submodules totally ordered");
    std::set<std::string> got, want;
    for (const auto& s : subs) got.insert(s.key());
    for (const auto& j : all_tuples(3, 2)) want.insert(vj_basis(3, j).key());
    L.expect(got == want, "submodules equal {V_j}");
}

void criterion4(Ledger& L) {
    const Subgroup F = quotient(make_fg(3), 4);
    const RmResult r1 = compute_Rm(F, 1), r2 = compute_Rm(F, 2);
    L.expect(r1.matches_chain && r1.members(3) == std::vector<IndexTuple>{{1}, {2}, {3}}, "FG p=3 R_1 = {(1),(2),(3)}");
    std::vector<IndexTuple> want2;
    for (unsigned a = 1; a <= 2; ++a)
        for (unsigned b = 1; b <= 3; ++b) want2.push_back({a, b});
    L.expect(r2.matches_chain && r2.members(3) == want2, "FG p=3 R_2 = {1,2}x{1,2,3}");
    L.note("FG p=3 R_2 = " + tuple_list(r2.members(3)));
    const RmResult rr = compute_Rm(remark_group(), 2, 3);
    std::vector<IndexTuple> wantr;
    for (const auto& j : all_tuples(5, 2))
        if (!(j[0] == 5 && j[1] == 5)) wantr.push_back(j);
    L.expect(rr.matches_chain && rr.members(5) == wantr, "three-generator p=5 group R_2 = {1..5}^2 minus (5,5)");
    L.note("p=5 three-generator group: t(2) = " + std::to_string(rr.t) + ", top " + tuple_str(rr.top));
}

void suite_clause(Ledger& L, const std::string& check, const GroupInstance& G, int depth, const std::string& tag) {
    SuiteOptions o;
    o.depth = depth;
    const CheckReport r = run_check(check, G, o);
    const json& d = r.details;
    const std::size_t fam = d.value("family_size", 0u);
    L.expect(r.status == Status::Pass, tag + " " + check + " status " + to_string(r.status));
    L.expect(fam >= 20, tag + " family has " + std::to_string(fam) + " members");
    std::string extra;
    if (d.contains("tested")) extra = ", " + std::to_string(d.at("tested").get<std::size_t>()) + " within depth budget";
    L.note(tag + " " + check + ": " + to_string(r.status) + " over " + std::to_string(fam) + " normal subgroups" + extra);
}

void criterion5(Ledger& L) {
    suite_clause(L, "effective_csp", make_fg(3), 5, "FG p=3");
    suite_clause(L, "effective_csp", make_ggs(3, {1, 2}), 5, "GS p=3");
    suite_clause(L, "branching", make_fg(3), 4, "FG p=3");
    suite_clause(L, "branching", make_ggs(5, {0, 1, 1, 0}), 4, "GGS p=5 symmetric");
}

void criterion6(Ledger& L) {
    const auto G = make_fg(3);
    const Subgroup G4 = quotient(G, 4);
    const auto fam = normal_family(G4, SuiteOptions{});
    L.expect(fam.size() >= 20, "family size " + std::to_string(fam.size()));
    std::size_t maxw = 0;
    for (const auto& f : fam) {
        const Subgroup C = commutator_subgroup(f.N, G4, G4.generators());
        maxw = std::max(maxw, f.N.exponent() - C.exponent());
    }
    L.expect(maxw <= 2, "max log_3|N:[N,G]| = " + std::to_string(maxw));
    const std::size_t wg = G4.exponent() - commutator_subgroup(G4, G4, G4.generators()).exponent();
    L.expect(wg == 2, "N = G_n attains 2 (got " + std::to_string(wg) + ")");
    for (int n = 2; n <= 5; ++n) {
        const auto lcs = lower_central(quotient(G, n), 400);
        std::size_t worst = 0;
        for (std::size_t k = 0; k + 1 < lcs.size(); ++k) worst = std::max(worst, lcs[k].exponent() - lcs[k + 1].exponent());
        L.expect(lcs.back().is_trivial() && worst <= 2, "lower central layers at depth " + std::to_string(n) + " have dim <= 2 (max " + std::to_string(worst) + ")");
    }
    L.note(std::to_string(fam.size()) + " normal subgroups, max width " + std::to_string(maxw));
}

void criterion7(Ledger& L) {
    const auto G = make_fg(3);
    const Subgroup G4 = quotient(G, 4), G3 = quotient(G, 3);
    const Subgroup St1 = G4.stabilizer(1), St2 = G4.stabilizer(2);
    L.expect(St2 == commutator_subgroup(St1, St1, G4.generators()), "St(2) = St(1)'");
    L.expect(St2 == coordinate_product(commutator_subgroup(G3, G3, G3.generators()), 1), "St(2) = psi^-1(G' x G' x G')");
    for (const auto& H : {make_fg(3), remark_group()}) {
        const Subgroup Hn = quotient(H, 4);
        L.expect(Hn.stabilizer(static_cast<int>(H.r_G()) + 1).is_subgroup_of(commutator_subgroup(Hn, Hn, Hn.generators())),
                 "St(r_G+1) <= G' for p=" + std::to_string(H.p()) + " r_G=" + std::to_string(H.r_G()));
    }
    const auto ds = derived_series(G4, 5);
    for (int m = 2; m <= 3; ++m) {
        const Subgroup& D = ds.at(static_cast<std::size_t>(m));
        const Subgroup S = G4.stabilizer(m);
        L.expect(D == S, "derived term " + std::to_string(m) + " equals St(" + std::to_string(m) + "): log_3 orders " + std::to_string(D.exponent()) +
                             " vs " + std::to_string(S.exponent()));
    }
}

void criterion8(Ledger& L) {
    for (const auto& G : {make_fg(3), remark_group()}) {
        const int n = static_cast<int>(G.r_dot()) + 1;
        const std::size_t d = min_generators(quotient(G, n));
        L.expect(G.branch_type() == BranchType::OverDerived && d == 1 + G.r_dot(),
                 "d(G/St(" + std::to_string(n) + ")) = " + std::to_string(d) + " for r_dot = " + std::to_string(G.r_dot()));
    }
    const auto B = make_multi_egs(spec(5, {{1, {0, 1, 1, 0}}, {2, {0, 1, 1, 0}}}));
    const std::size_t dB = min_generators(quotient(B, 3));
    L.expect(dB == 3, "d(G_3) = " + std::to_string(dB) + " for the symmetric p=5 pair");
    const auto H2 = make_multi_ggs(5, {{1, 0, 0, 0}, {0, 1, 0, 0}});
    const auto H3 = make_multi_ggs(5, {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}});
    L.expect(H2.has_csp() && H3.has_csp(), "both p=5 groups satisfy the hypotheses");
    const std::size_t d2 = min_generators(quotient(H2, 4)), d3 = min_generators(quotient(H3, 4));
    L.expect(d2 == 3 && d3 == 4, "abelianization ranks " + std::to_string(d2) + " and " + std::to_string(d3));
    L.note("p=5 pair ranks " + std::to_string(d2) + " vs " + std::to_string(d3));
}

void criterion9(Ledger& L) {
    const auto S = make_sunic(2, {1, 1});
    auto K = [&](int n) { return sunic_K(S, n, {}); };
    L.expect(is_regular_branch_over(K(6), K(5)), "p=2: regular branch over K");
    L.expect(is_super_strongly_fractal(S, 4), "p=2: super strongly fractal to depth 4");
    const Subgroup S6 = quotient(S, 6);
    for (int m = 1; m <= 2; ++m) L.expect(compute_Rm(S6, m).t == tree::ipow(2, m), "p=2: R_" + std::to_string(m) + " = {1,2}^" + std::to_string(m));
    const auto nG = sunic_nG(S, sunic_nG_depth(), {});
    L.expect(nG.has_value(), "p=2: n_G computed");
    if (nG) L.note("n_G = " + std::to_string(*nG) + " (smallest level found at depth " + std::to_string(sunic_nG_depth()) + ")");
    SuiteOptions o;
    const CheckReport w2 = run_check("width_rank", S, o);
    L.expect(w2.status == Status::Pass && w2.details.value("family_size", 0u) >= 20, "p=2: width bound r_G+n_G+3 over the family");
    L.expect(run_check("sunic", S, o).status == Status::Pass, "p=2: full suite");
    const auto T = make_sunic(3, {2});
    const Subgroup T4 = quotient(T, 4), T3 = quotient(T, 3);
    L.expect(is_regular_branch_over(commutator_subgroup(T4, T4, T4.generators()), commutator_subgroup(T3, T3, T3.generators())), "p=3: regular branch over G'");
    const CheckReport w3 = run_check("width_rank", T, o);
    L.expect(w3.status == Status::Pass && w3.details.value("width_bound", 0) == 4, "p=3: width bound r_G+3 = 4");
    L.expect(run_check("sunic", T, o).status == Status::Pass, "p=3: full suite");
}

void criterion10(Ledger& L) {
    std::size_t compared = 0;
    const std::vector<GroupInstance> groups{make_fg(3), make_fg(5), make_ggs(3, {1, 2}), make_ggs(5, {0, 1, 1, 0}), remark_group(),
                                            make_sunic(2, {1, 1}), make_sunic(2, {1, 0, 1}), make_sunic(3, {2}), make_fg(7)};
    for (const auto& G : groups)
        for (int n = 1; n <= 12; ++n) {
            const Subgroup Gn = quotient(G, n);
            if (Gn.exponent() > 12) break;
            const auto e = oracle::bfs_enumerate(G.generators(n), G.prime(), n);
            L.expect(e.exponent == Gn.exponent(), "BFS order for p=" + std::to_string(G.p()) + " depth " + std::to_string(n));
            ++compared;
        }
    for (const auto& G : {make_fg(3), make_ggs(3, {1, 2})}) {
        GModule M = trivial_module(G);
        for (int m = 1; m <= 3; ++m) {
            M = twisted_sum(M, G);
            const GModule W = wm_module(G, m);
            bool eq = M.dim == W.dim;
            for (std::size_t g = 0; eq && g < W.maps.size(); ++g) eq = M.maps[g] == W.maps[g];
            L.expect(eq, "twisted sum equals W_" + std::to_string(m));
        }
    }
    L.note(std::to_string(compared) + " quotients compared against BFS");
}

struct Criterion {
    int id;
    std::string title;
    double budget_s;
    std::function<void(Ledger&)> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> cs{
        {1, "t(m) closed form", 60, criterion1},
        {2, "normal subgroups between consecutive stabilizers form a chain", 120, criterion2},
        {3, "submodule census of W_2", 60, criterion3},
        {4, "R_m values", 60, criterion4},
        {5, "effective congruence offsets and branching inclusions", 180, criterion5},
        {6, "central width", 60, criterion6},
        {7, "structure identities", 60, criterion7},
        {8, "generator counts", 60, criterion8},
        {9, "Sunic suite", 180, criterion9},
        {10, "oracle agreement", 60, criterion10},
    };
    int failed = 0;
    for (const auto& c : cs) {
        Ledger L;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.run(L);
        } catch (const std::exception& e) {
            L.expect(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        L.expect(secs < c.budget_s, "time budget " + std::to_string(static_cast<int>(c.budget_s)) + " s");
        std::ostringstream line;
        line.setf(std::ios::fixed);
        line.precision(1);
        line << (L.ok ? "PASS" : "FAIL") << "  criterion " << c.id << ": " << c.title << " (" << secs << " s)";
        std::cout << line.str() << "\n" << L.notes.str() << std::flush;
        failed += !L.ok;
    }
    std::cout << (cs.size() - static_cast<std::size_t>(failed)) << "/" << cs.size() << " criteria passed\n";
    return failed ? 1 : 0;
}
