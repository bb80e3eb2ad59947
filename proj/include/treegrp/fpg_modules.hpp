#pragma once

// F_pG-modules attached to the tree: W_m (the permutation module on level-m
// vertices), twisted p-fold sums, the chain of submodules V_j indexed by
// tuples j in {1..p}^m, uniserial chains and the sets R_m.

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fp_linalg.hpp"
#include "group_catalog.hpp"
#include "quotient_engine.hpp"
#include "tree_core.hpp"

namespace treegrp {

/// Row-vector module: v.g = v * maps[g], one map per group generator.
struct GModule {
    unsigned p = 2;
    std::size_t dim = 0;
    std::vector<FpMatrix> maps;

    FpVec act(const FpVec& v, std::size_t g) const { return maps.at(g).apply(v); }

    FpMatrix word_map(const Word& w) const {
        FpMatrix acc = FpMatrix::identity(p, dim);
        for (const auto& l : w)
            if (l.exp) acc = acc * maps.at(static_cast<std::size_t>(l.gen)).pow(l.exp);
        return acc;
    }
};

inline GModule trivial_module(const GroupInstance& G) {
    return {G.p(), 1, std::vector<FpMatrix>(G.num_generators(), FpMatrix::identity(G.p(), 1))};
}

/// W_m: coordinates are level-m vertices in lexicographic order, M[u][u^g] = 1.
inline GModule wm_module(const GroupInstance& G, int m) {
    const unsigned p = G.p();
    const std::size_t d = tree::level_size(p, m);
    GModule M{p, d, {}};
    const auto gens = G.generators(m);
    for (const auto& g : gens) {
        FpMatrix A(p, d);
        for (std::size_t i = 0; i < d; ++i) {
            const Vertex u = Vertex::from_index(p, m, i);
            A(i, apply_vertex(g, u).local_index(p)) = 1;
        }
        M.maps.push_back(std::move(A));
    }
    return M;
}

/// V|^{(+)p}: a generator with root label rho and psi-coordinate words w_c maps
/// block c to block c + rho through the V-map of w_c.
inline GModule twisted_sum(const GModule& V, const GroupInstance& G) {
    if (V.maps.size() != G.num_generators()) throw std::invalid_argument("twisted_sum: module lacks maps for all generators");
    const unsigned p = G.p();
    const std::size_t d = V.dim, D = d * p;
    GModule out{p, D, {}};
    for (const auto& rule : G.rules()) {
        FpMatrix A(p, D);
        for (unsigned c = 0; c < p; ++c) {
            const FpMatrix B = V.word_map(rule.coords[c]);
            const std::size_t to = (c + rule.root) % p;
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j) A(c * d + i, to * d + j) = B(i, j);
        }
        out.maps.push_back(std::move(A));
    }
    return out;
}

/// Smallest invariant subspace containing seed.
inline FpSubspace submodule_closure(const FpSubspace& seed, const GModule& M) {
    FpSubspace S(M.p, M.dim);
    std::vector<FpVec> todo = seed.basis();
    while (!todo.empty()) {
        FpVec v = std::move(todo.back());
        todo.pop_back();
        if (!S.insert(v)) continue;
        for (const auto& A : M.maps) todo.push_back(A.apply(v));
    }
    return S;
}

inline FpSubspace submodule_closure(const FpVec& v, const GModule& M) {
    return submodule_closure(FpSubspace::span(M.p, M.dim, {v}), M);
}

inline bool is_invariant(const FpSubspace& U, const GModule& M) {
    for (const auto& v : U.basis())
        for (const auto& A : M.maps)
            if (!U.contains(A.apply(v))) return false;
    return true;
}

/// [U, G]: the submodule generated by u(g - 1).
inline FpSubspace commutator_subspace(const FpSubspace& U, const GModule& M) {
    if (!is_invariant(U, M)) throw std::invalid_argument("commutator_subspace: subspace is not invariant");
    FpSubspace S(M.p, M.dim);
    for (const auto& u : U.basis())
        for (const auto& A : M.maps) {
            FpVec w = A.apply(u);
            fp::axpy(w, u, M.p - 1, M.p);
            S.insert(w);
        }
    return submodule_closure(S, M);
}

struct UniserialResult {
    bool uniserial = true;
    std::vector<FpSubspace> layers;  // U, [U,G], [[U,G],G], ..., down to (excluding) 0
    std::optional<std::size_t> witness_layer;  // index of a layer whose successor has codimension >= 2
};

inline UniserialResult uniserial_chain(const FpSubspace& U, const GModule& M) {
    UniserialResult r;
    FpSubspace cur = U;
    while (cur.dim() > 0) {
        FpSubspace next = commutator_subspace(cur, M);
        r.layers.push_back(cur);
        if (cur.dim() - next.dim() != 1 && r.uniserial) {
            r.uniserial = false;
            r.witness_layer = r.layers.size() - 1;
        }
        cur = std::move(next);
    }
    return r;
}

// --- index tuples ---

using IndexTuple = std::vector<unsigned>;

inline bool is_sentinel(const IndexTuple& j) { return !j.empty() && j[0] == 0; }

inline void validate_tuple(const IndexTuple& j, unsigned p) {
    if (j.empty()) throw std::invalid_argument("index tuple must be nonempty");
    if (is_sentinel(j)) {
        for (std::size_t k = 1; k < j.size(); ++k)
            if (j[k] != p) throw std::invalid_argument("malformed sentinel tuple");
        return;
    }
    for (auto x : j)
        if (x < 1 || x > p) throw std::invalid_argument("index tuple entry outside 1..p");
}

inline std::string tuple_str(const IndexTuple& j) {
    std::string s = "(";
    for (std::size_t k = 0; k < j.size(); ++k) s += (k ? "," : "") + std::to_string(j[k]);
    return s + ")";
}

inline IndexTuple predecessor(const IndexTuple& j, unsigned p) {
    validate_tuple(j, p);
    if (is_sentinel(j)) throw std::invalid_argument("predecessor of the sentinel tuple");
    if (j.size() == 1) return {j[0] - 1};
    IndexTuple prefix(j.begin(), j.end() - 1);
    const unsigned last = j.back();
    if (last >= 2) {
        prefix.push_back(last - 1);
        return prefix;
    }
    IndexTuple pp;
    if (std::all_of(prefix.begin(), prefix.end(), [](unsigned x) { return x == 1; })) {
        pp.assign(prefix.size(), p);
        pp[0] = 0;
    } else {
        pp = predecessor(prefix, p);
    }
    pp.push_back(p);
    return pp;
}

/// dim V_j = 1 + sum_k (j_k - 1) p^(m-k); the sentinel has dimension 0.
inline std::size_t tuple_dim(const IndexTuple& j, unsigned p) {
    validate_tuple(j, p);
    if (is_sentinel(j)) return 0;
    std::size_t d = 0;
    for (auto x : j) d = d * p + (x - 1);
    return d + 1;
}

/// The tuple with dim V_j = d (d in 1..p^m), or the sentinel for d = 0.
inline IndexTuple tuple_of_dim(unsigned p, int m, std::size_t d) {
    if (d > tree::level_size(p, m)) throw std::out_of_range("no index tuple of that dimension");
    IndexTuple j(static_cast<std::size_t>(m));
    if (d == 0) {
        std::fill(j.begin(), j.end(), p);
        j[0] = 0;
        return j;
    }
    std::size_t x = d - 1;
    for (int k = m - 1; k >= 0; --k) {
        j[static_cast<std::size_t>(k)] = static_cast<unsigned>(x % p) + 1;
        x /= p;
    }
    return j;
}

/// All tuples of J_m in chain (lexicographic) order.
inline std::vector<IndexTuple> all_tuples(unsigned p, int m) {
    std::vector<IndexTuple> out;
    for (std::size_t d = 1; d <= tree::level_size(p, m); ++d) out.push_back(tuple_of_dim(p, m, d));
    return out;
}

struct VjData {
    FpSubspace space;
    FpVec generator;  // canonical w_j (empty for the sentinel)
};

namespace detail {

inline FpVec a_minus_one_power(FpVec v, unsigned p, unsigned e) {
    for (unsigned t = 0; t < e; ++t) {
        FpVec w(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) w[(i + 1) % v.size()] = v[i];
        fp::axpy(w, v, p - 1, p);
        v = std::move(w);
    }
    return v;
}

}  // namespace detail

/// V_j inside W_m = F_p^{p^m}, with its canonical generator.
inline VjData vj_data(unsigned p, const IndexTuple& j) {
    validate_tuple(j, p);
    const int m = static_cast<int>(j.size());
    const std::size_t D = tree::level_size(p, m);
    if (is_sentinel(j)) return {FpSubspace(p, D), {}};
    if (m == 1) {
        FpSubspace S(p, p);
        FpVec w;
        for (unsigned i = 0; i < p; ++i) {
            FpVec d(p, 0);
            d[i] = 1;
            FpVec v = detail::a_minus_one_power(d, p, p - j[0]);
            if (i == 0) w = v;
            S.insert(v);
        }
        return {S, w};
    }
    const IndexTuple prefix(j.begin(), j.end() - 1);
    const VjData top = vj_data(p, prefix);
    const VjData below = vj_data(p, predecessor(prefix, p));
    const VjData last = vj_data(p, {j.back()});
    const std::size_t d = D / p;
    FpSubspace S(p, D);
    for (const auto& b : below.space.basis())
        for (unsigned c = 0; c < p; ++c) {
            FpVec v(D, 0);
            std::copy(b.begin(), b.end(), v.begin() + static_cast<std::ptrdiff_t>(c * d));
            S.insert(v);
        }
    auto lift = [&](const FpVec& lam) {
        FpVec v(D, 0);
        for (unsigned c = 0; c < p; ++c)
            for (std::size_t i = 0; i < d; ++i) v[c * d + i] = static_cast<std::uint8_t>(lam[c] * top.generator[i] % p);
        return v;
    };
    for (const auto& lam : last.space.basis()) S.insert(lift(lam));
    return {S, lift(last.generator)};
}

inline FpSubspace vj_basis(unsigned p, const IndexTuple& j) { return vj_data(p, j).space; }
inline FpVec canonical_generator(unsigned p, const IndexTuple& j) { return vj_data(p, j).generator; }

struct RmResult {
    int m = 0;
    std::size_t t = 0;             // dim of the image of St_G(m) in W_m
    IndexTuple top;                // j with V_j equal to that image (sentinel when t = 0)
    bool matches_chain = true;     // false: the image is no V_j
    FpSubspace image;

    /// Membership in R_m: all tuples below the top one.
    bool contains(const IndexTuple& j, unsigned p) const { return matches_chain && tuple_dim(j, p) <= t; }
    std::vector<IndexTuple> members(unsigned p) const {
        std::vector<IndexTuple> out;
        for (std::size_t d = 1; d <= t; ++d) out.push_back(tuple_of_dim(p, m, d));
        return out;
    }
};

/// R_m read off the image of St_G(m) in W_m, computed in G_n (n >= m + 1).
inline RmResult compute_Rm(const Subgroup& Gn, int m) {
    if (m < 1) throw std::invalid_argument("compute_Rm needs m >= 1");
    if (Gn.depth() < m + 1) throw std::invalid_argument("compute_Rm needs depth >= m + 1");
    RmResult r;
    r.m = m;
    r.image = Gn.image_in_Wm(m);
    r.t = r.image.dim();
    r.top = tuple_of_dim(Gn.p(), m, r.t);
    r.matches_chain = vj_basis(Gn.p(), r.top) == r.image;
    return r;
}

inline RmResult compute_Rm(const GroupInstance& G, int m, int n, EngineLimits limits = {}) {
    return compute_Rm(quotient(G, n, limits), m);
}

}  // namespace treegrp
