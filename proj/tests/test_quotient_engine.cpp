#include <gtest/gtest.h>

#include <random>

#include <treegrp/group_catalog.hpp>
#include <treegrp/oracle.hpp>
#include <treegrp/quotient_engine.hpp>

using namespace treegrp;

namespace {

MultiEGSSpec spec(unsigned p, std::vector<std::pair<unsigned, DefiningVector>> fams) {
    MultiEGSSpec s{p, std::vector<std::vector<DefiningVector>>(p)};
    for (auto& [j, v] : fams) s.families[j - 1].push_back(v);
    return s;
}

GroupInstance remark_group() { return make_multi_egs(spec(5, {{1, {1, 0, 0, 0}}, {5, {1, 1, 0, 0}}})); }

// every element as a product of pivot powers
std::unordered_set<Portrait, PortraitHash> chain_elements(const Subgroup& H) {
    std::unordered_set<Portrait, PortraitHash> out{H.identity()};
    for (const auto& x : H.pivots()) {
        std::vector<Portrait> cur(out.begin(), out.end());
        Portrait xp = H.identity();
        for (unsigned c = 1; c < H.p(); ++c) {
            xp = compose(xp, x);
            for (const auto& g : cur) out.insert(compose(g, xp));
        }
    }
    return out;
}

}  // namespace

TEST(Build, Examples) {
    const auto G = make_fg(3);
    for (int n = 1; n <= 4; ++n) EXPECT_EQ(Subgroup::generate(Prime(3), n, {rooted_a(Prime(3), n)}).exponent(), 1u);
    EXPECT_EQ(quotient(G, 1).exponent(), 1u);
    EXPECT_EQ(quotient(G, 2).exponent(), oracle::bfs_enumerate(G.generators(2), G.prime(), 2).exponent);
}

TEST(Membership, Examples) {
    const auto G = make_fg(3);
    const Subgroup G3 = quotient(G, 3);
    const auto g = G.generators(3);
    EXPECT_TRUE(G3.contains(compose(g[0], g[1], inverse(g[0]), g[1], g[1])));
    const Subgroup A = Subgroup::generate(Prime(3), 2, {G.generator(0, 2)});
    EXPECT_FALSE(A.contains(G.generator(1, 2)));
    EXPECT_FALSE(oracle::bfs_enumerate({G.generator(0, 2)}, Prime(3), 2).elements.count(G.generator(1, 2)));
    EXPECT_TRUE(G3 == G3);
    EXPECT_TRUE(A.is_subgroup_of(quotient(G, 2)));
}

TEST(Stabilizer, Examples) {
    for (const auto& G : {make_fg(3), make_ggs(3, {1, 2}), make_fg(5)}) {
        const int n = G.p() == 3 ? 4 : 3;
        const Subgroup Gn = quotient(G, n);
        EXPECT_TRUE(Gn.stabilizer(0) == Gn);
        EXPECT_TRUE(Gn.stabilizer(n).is_trivial());
        EXPECT_EQ(Gn.exponent() - Gn.stabilizer(1).exponent(), 1u);
        for (int m = 0; m <= n; ++m)
            for (const auto& x : Gn.stabilizer(m).pivots()) EXPECT_TRUE(in_stab(x, m));
    }
}

TEST(SectionSubgroup, Examples) {
    const auto G = make_fg(3);
    const Subgroup G4 = quotient(G, 4);
    EXPECT_TRUE(section_subgroup(G4, Vertex()) == G4);
    const Subgroup St1 = G4.stabilizer(1);
    for (unsigned c = 1; c <= 3; ++c) EXPECT_TRUE(section_subgroup(St1, Vertex({c})) == quotient(G, 3));
    const auto S = make_sunic(2, {1, 1});
    const Subgroup S6 = quotient(S, 6);
    EXPECT_TRUE(section_subgroup(S6.stabilizer(2), Vertex::parse("22")) == quotient(S, 4));
}

TEST(VertexStabilizer, MatchesBruteForce) {
    const auto G = make_ggs(3, {1, 2});
    const Subgroup G3 = quotient(G, 3);
    const auto all = oracle::bfs_enumerate(G.generators(3), G.prime(), 3).elements;
    for (const char* w : {"1", "23", "312", "33"}) {
        const Vertex v = Vertex::parse(w);
        std::size_t fixers = 0;
        for (const auto& g : all) fixers += apply_vertex(g, v) == v;
        const Subgroup K = vertex_stabilizer(G3, v);
        EXPECT_EQ(tree::ipow(3, static_cast<int>(K.exponent())), fixers) << w;
        for (const auto& x : K.pivots()) EXPECT_EQ(apply_vertex(x, v), v);
    }
}

TEST(NormalClosure, Examples) {
    const auto G = make_fg(3);
    const auto g = G.generators(3);
    EXPECT_TRUE(normal_closure(g, {Portrait(Prime(3), 3)}).is_trivial());
    // |G : G'| = p^(r_G + 1)
    for (const auto& H : {make_fg(3), make_fg(5), remark_group(), make_ggs(3, {1, 2})}) {
        const int n = H.p() == 3 ? 4 : 3;
        const Subgroup Hn = quotient(H, n);
        const Subgroup D = commutator_subgroup(Hn, Hn, Hn.generators());
        EXPECT_EQ(Hn.exponent() - D.exponent(), H.r_G() + 1);
        EXPECT_TRUE(D.is_normalized_by(Hn.generators()));
    }
    // K = <[a,b]>^G for the Grigorchuk group has index 2^4 in G
    const auto S = make_sunic(2, {1, 1});
    const Subgroup S5 = quotient(S, 5);
    const auto sg = S5.generators();
    const Subgroup K = normal_closure(sg, {commutator(sg[0], sg[2])});
    EXPECT_EQ(S5.exponent() - K.exponent(), 4u);
    EXPECT_TRUE(K.is_normalized_by(sg));
}

TEST(Series, LowerCentralAndDerived) {
    const auto G = make_fg(3);
    const Subgroup G5 = quotient(G, 5);
    const auto lcs = lower_central(G5, 200);
    EXPECT_TRUE(lcs[1] == commutator_subgroup(G5, G5, G5.generators()));
    for (std::size_t k = 0; k + 1 < lcs.size(); ++k) EXPECT_LE(lcs[k].exponent() - lcs[k + 1].exponent(), 2u);
    EXPECT_TRUE(lcs.back().is_trivial());
}

// G'' = St(2) for the Fabrykowski-Gupta groups with p = 5, 7.
TEST(Series, DerivedEqualsStabilizerForLargerPrimes) {
    for (unsigned p : {5u, 7u}) {
        const Subgroup G3 = quotient(make_fg(p), 3);
        const auto ds = derived_series(G3, 4);
        ASSERT_GE(ds.size(), 3u);
        EXPECT_TRUE(ds[2] == G3.stabilizer(2)) << "p=" << p;
    }
}

// For p = 3 the second derived subgroup is strictly smaller than St(2) modulo St(3),
// confirmed by brute-force enumeration of G_3.
TEST(Series, DerivedSubgroupForPrimeThree) {
    const auto G = make_fg(3);
    const Subgroup G3 = quotient(G, 3);
    const auto ds = derived_series(G3, 4);
    EXPECT_EQ(ds[2].exponent(), 4u);
    EXPECT_EQ(G3.stabilizer(2).exponent(), 6u);
    EXPECT_TRUE(ds[2].is_subgroup_of(G3.stabilizer(2)));
    const auto all = oracle::bfs_enumerate(G.generators(3), G.prime(), 3).elements;
    const std::vector<Portrait> v(all.begin(), all.end());
    std::mt19937 rng(5);
    std::vector<Portrait> comms;
    for (int t = 0; t < 4000; ++t) comms.push_back(commutator(v[rng() % v.size()], v[rng() % v.size()]));
    const auto D1 = oracle::bfs_enumerate(comms, G.prime(), 3).elements;
    const std::vector<Portrait> d1(D1.begin(), D1.end());
    comms.clear();
    for (int t = 0; t < 4000; ++t) comms.push_back(commutator(d1[rng() % d1.size()], d1[rng() % d1.size()]));
    EXPECT_EQ(oracle::bfs_enumerate(comms, G.prime(), 3).count, 81u);
}

TEST(MinGenerators, Examples) {
    EXPECT_EQ(min_generators(Subgroup::generate(Prime(5), 3, {rooted_a(Prime(5), 3)})), 1u);
    const auto R = remark_group();
    EXPECT_EQ(min_generators(quotient(R, static_cast<int>(R.r_dot()) + 1)), 1 + R.r_dot());
    const auto B = make_multi_egs(spec(5, {{1, {0, 1, 1, 0}}, {2, {0, 1, 1, 0}}}));
    EXPECT_EQ(min_generators(quotient(B, 3)), 3u);
}

TEST(ImageInWm, Examples) {
    const auto G = make_fg(3);
    const Subgroup G4 = quotient(G, 4);
    EXPECT_EQ(G4.image_in_Wm(0).dim(), 1u);
    EXPECT_EQ(G4.image_in_Wm(1).dim(), 3u);
    EXPECT_EQ(G4.image_in_Wm(2).dim(), 6u);
    // pullback lands in St(m) with the requested labels
    const FpSubspace U = G4.image_in_Wm(2);
    for (const auto& v : U.basis()) {
        const Portrait x = G4.stabilizer(2).pullback(v, 2);
        EXPECT_TRUE(G4.contains(x));
        const auto l = level_labels(x, 2);
        EXPECT_EQ(FpVec(l.begin(), l.end()), v);
    }
}

TEST(MaxStabDepth, Examples) {
    const auto G = make_fg(3);
    const Subgroup G4 = quotient(G, 4);
    EXPECT_EQ(G4.stabilizer(2).max_stab_depth(), 2);
    EXPECT_EQ(G4.max_stab_depth(), 0);
}

// G / St(2) is the full wreath product C_p wr C_p, which has class p, so gamma_3 is not inside St(2).
TEST(MaxStabDepth, Gamma3OfFabrykowskiGupta) {
    for (unsigned p : {3u, 5u}) {
        const auto G = make_fg(p);
        const int n = p == 3 ? 4 : 3;
        const Subgroup Gn = quotient(G, n);
        const Subgroup g3 = lower_central(Gn, 3).back();
        EXPECT_EQ(g3.max_stab_depth(), 1);
        EXPECT_TRUE(Gn.stabilizer(2).is_subgroup_of(g3));
        EXPECT_FALSE(g3 == Gn.stabilizer(2));
    }
    // brute force: gamma_3 of G_2 for p = 3 is nontrivial
    const auto G = make_fg(3);
    const auto all = oracle::bfs_enumerate(G.generators(2), G.prime(), 2).elements;
    bool found = false;
    for (const auto& x : all)
        for (const auto& y : all)
            for (const auto& z : G.generators(2)) found = found || !commutator(commutator(x, y), z).is_identity();
    EXPECT_TRUE(found);
}

TEST(RegularBranch, Examples) {
    auto derived = [](const GroupInstance& G, int n) {
        const Subgroup Gn = quotient(G, n);
        return commutator_subgroup(Gn, Gn, Gn.generators());
    };
    auto gamma3 = [](const GroupInstance& G, int n) { return lower_central(quotient(G, n), 3).back(); };
    const auto fg = make_fg(3);
    EXPECT_TRUE(is_regular_branch_over(derived(fg, 4), derived(fg, 3)));
    const auto sym = make_ggs(5, {0, 1, 1, 0});
    EXPECT_FALSE(is_regular_branch_over(derived(sym, 3), derived(sym, 2)));
    EXPECT_TRUE(is_regular_branch_over(gamma3(sym, 3), gamma3(sym, 2)));
    const auto S = make_sunic(2, {1, 1});
    auto K = [&](int n) {
        const auto g = quotient(S, n).generators();
        return normal_closure(g, {commutator(g[0], g[2])});
    };
    EXPECT_TRUE(is_regular_branch_over(K(6), K(5)));
}

TEST(Fractal, SuperStronglyFractal) {
    EXPECT_TRUE(is_super_strongly_fractal(make_fg(3), 4));
    EXPECT_TRUE(is_super_strongly_fractal(make_sunic(2, {1, 1}), 4));
    EXPECT_TRUE(is_super_strongly_fractal(make_sunic(2, {1, 0, 1}), 4));
    // <a> alone: the first-level stabilizer is trivial
    const Subgroup A = Subgroup::generate(Prime(3), 3, {rooted_a(Prime(3), 3)});
    EXPECT_TRUE(section_subgroup(A.stabilizer(1), Vertex({1})).is_trivial());
}

TEST(Fractal, SubdirectDerived) {
    EXPECT_TRUE(is_subdirect_psi_derived(make_fg(3), 4));
    EXPECT_TRUE(is_subdirect_psi_derived(make_sunic(3, {2}), 4));
    EXPECT_TRUE(is_subdirect_psi_derived(make_sunic(5, {1, 3}), 3));
}

TEST(EngineProperties, StructureIdentities) {
    // St(2) = St(1)' = psi^-1(G' x ... x G') for non-torsion GGS groups branching over G'
    for (const auto& G : {make_fg(3), make_fg(5), make_ggs(5, {1, 2, 0, 0})}) {
        const int n = G.p() == 3 ? 4 : 3;
        const Subgroup Gn = quotient(G, n);
        const Subgroup St1 = Gn.stabilizer(1);
        EXPECT_TRUE(Gn.stabilizer(2) == commutator_subgroup(St1, St1, Gn.generators()));
        const Subgroup Gs = quotient(G, n - 1);
        EXPECT_TRUE(Gn.stabilizer(2) == coordinate_product(commutator_subgroup(Gs, Gs, Gs.generators()), 1));
    }
    // St(r_G + 1) <= G'
    for (const auto& G : {make_fg(3), remark_group()}) {
        const int n = G.p() == 3 ? 4 : 4;
        const Subgroup Gn = quotient(G, n);
        const Subgroup D = commutator_subgroup(Gn, Gn, Gn.generators());
        EXPECT_TRUE(Gn.stabilizer(static_cast<int>(G.r_G()) + 1).is_subgroup_of(D));
    }
    // St(2) <= gamma_3 for GGS groups
    for (const auto& G : {make_fg(3), make_ggs(3, {1, 2}), make_ggs(5, {0, 1, 1, 0})}) {
        const Subgroup Gn = quotient(G, G.p() == 3 ? 4 : 3);
        EXPECT_TRUE(Gn.stabilizer(2).is_subgroup_of(lower_central(Gn, 3).back()));
    }
}

TEST(EngineProperties, ChainConsistency) {
    for (const auto& G : {make_fg(3), make_ggs(3, {1, 2}), make_sunic(2, {1, 1}), remark_group()}) {
        const int n = G.p() == 2 ? 6 : (G.p() == 3 ? 5 : 3);
        const Subgroup Gn = quotient(G, n);
        std::size_t sum = 0;
        for (int m = 0; m < n; ++m) {
            sum += Gn.layer_dim(m);
            EXPECT_EQ(Gn.layer_dim(m), Gn.image_in_Wm(m).dim());
            EXPECT_EQ(Gn.exponent(), sum + Gn.stabilizer(m + 1).exponent());
        }
        EXPECT_EQ(sum, Gn.exponent());
    }
}

TEST(EngineProperties, BfsOracleEquivalence) {
    struct Case {
        GroupInstance G;
        int max_depth;
    };
    const std::vector<Case> cases{{make_fg(3), 3}, {make_ggs(3, {1, 2}), 3}, {make_sunic(2, {1, 1}), 4}, {make_fg(5), 2}, {make_sunic(3, {2}), 3}};
    for (const auto& c : cases)
        for (int n = 1; n <= c.max_depth; ++n) {
            const Subgroup Gn = quotient(c.G, n);
            ASSERT_LE(Gn.exponent(), 12u);
            const auto bfs = oracle::bfs_enumerate(c.G.generators(n), c.G.prime(), n);
            EXPECT_EQ(bfs.exponent, Gn.exponent());
            EXPECT_EQ(chain_elements(Gn), bfs.elements);
        }
}

TEST(EngineProperties, ResourceGuard) {
    EngineLimits tiny;
    tiny.max_pivots = 5;
    EXPECT_THROW(quotient(make_fg(3), 4, tiny), ResourceExceeded);
}
