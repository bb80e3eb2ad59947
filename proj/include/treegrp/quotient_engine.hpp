#pragma once

// Subgroups of the finite quotients G_n = G/St_G(n).
//
// A subgroup H of the depth-n Sylow group is stored as a pivot table: for each
// breadth-lex vertex position at most one element of H whose labels vanish
// before that position and equal 1 at it. Sifting an element against the
// table clears its leading label repeatedly; the table is complete when every
// generator, every p-th power of a pivot and every commutator of two pivots
// sifts to the identity. Then |H| = p^(number of pivots), the pivots at
// positions >= offset(m) generate St_H(m), and their level-m rows span the
// image of St_H(m) in W_m.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fp_linalg.hpp"
#include "group_catalog.hpp"
#include "tree_core.hpp"

namespace treegrp {

struct EngineLimits {
    std::size_t max_pivots = 2500;
    std::size_t max_sifts = 3'000'000;
};

class ResourceExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Subgroup {
public:
    Subgroup() = default;
    Subgroup(Prime p, int depth, EngineLimits limits = {})
        : p_(p.value()), depth_(depth), limits_(limits), slot_(tree::label_count(p.value(), depth), -1) {}

    /// The subgroup generated by gens (all of depth n).
    static Subgroup generate(Prime p, int depth, const std::vector<Portrait>& gens, EngineLimits limits = {}) {
        Subgroup h(p, depth, limits);
        h.gens_ = gens;
        h.close(gens, {});
        return h;
    }

    /// The smallest subgroup containing seeds and closed under conjugation by normalizers.
    static Subgroup normal_closure(Prime p, int depth, const std::vector<Portrait>& seeds, const std::vector<Portrait>& normalizers,
                                   EngineLimits limits = {}) {
        Subgroup h(p, depth, limits);
        h.close(seeds, normalizers);
        return h;
    }

    /// This subgroup enlarged by seeds, closing under conjugation by normalizers.
    /// The current table must already be closed under those normalizers.
    Subgroup extended(const std::vector<Portrait>& seeds, const std::vector<Portrait>& normalizers) const {
        Subgroup h = *this;
        h.gens_.clear();
        h.close(seeds, normalizers);
        return h;
    }

    unsigned p() const { return p_; }
    Prime prime() const { return Prime(p_); }
    int depth() const { return depth_; }
    const EngineLimits& limits() const { return limits_; }

    /// log_p |H|.
    std::size_t exponent() const { return pivots_.size(); }
    bool is_trivial() const { return pivots_.empty(); }

    /// Pivots in increasing position order.
    std::vector<Portrait> pivots() const {
        std::vector<Portrait> out;
        out.reserve(pivots_.size());
        for (int s : slot_)
            if (s >= 0) out.push_back(pivots_[static_cast<std::size_t>(s)]);
        return out;
    }

    std::vector<std::size_t> pivot_positions() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < slot_.size(); ++i)
            if (slot_[i] >= 0) out.push_back(i);
        return out;
    }

    /// A generating set: the original generators if this was built by generate(), else the pivots.
    std::vector<Portrait> generators() const { return gens_.empty() ? pivots() : gens_; }

    Portrait identity() const { return Portrait(Prime(p_), depth_); }

    /// Remainder of g after sifting (identity iff g lies in H).
    Portrait sift(Portrait g) const {
        check(g);
        std::size_t pos = g.leading_index();
        const std::size_t L = slot_.size();
        while (pos < L) {
            const int s = slot_[pos];
            if (s < 0) return g;
            const unsigned c = g[pos];
            g = compose(g, powers_[static_cast<std::size_t>(s)][p_ - c - 1]);
            pos = g.leading_index(pos + 1);
        }
        return g;
    }

    bool contains(const Portrait& g) const { return sift(g).is_identity(); }

    bool is_subgroup_of(const Subgroup& other) const {
        for (const auto& x : pivots_)
            if (!other.contains(x)) return false;
        return true;
    }

    friend bool operator==(const Subgroup& a, const Subgroup& b) {
        return a.p_ == b.p_ && a.depth_ == b.depth_ && a.exponent() == b.exponent() && a.is_subgroup_of(b);
    }

    bool is_normalized_by(const std::vector<Portrait>& gens) const {
        for (const auto& x : pivots_)
            for (const auto& g : gens)
                if (!contains(conjugate(x, g))) return false;
        return true;
    }

    /// St_H(m), read off the tail of the table.
    Subgroup stabilizer(int m) const {
        if (m < 0 || m > depth_) throw std::out_of_range("stabilizer level outside 0..depth");
        Subgroup h(Prime(p_), depth_, limits_);
        const std::size_t start = tree::level_offset(p_, m);
        for (std::size_t i = start; i < slot_.size(); ++i) {
            const int s = slot_[i];
            if (s < 0) continue;
            h.slot_[i] = static_cast<int>(h.pivots_.size());
            h.pivots_.push_back(pivots_[static_cast<std::size_t>(s)]);
            h.powers_.push_back(powers_[static_cast<std::size_t>(s)]);
        }
        return h;
    }

    /// log_p |St_H(m) : St_H(m+1)|.
    std::size_t layer_dim(int m) const {
        std::size_t c = 0;
        for (std::size_t i = tree::level_offset(p_, m); i < tree::level_offset(p_, m + 1); ++i) c += slot_[i] >= 0;
        return c;
    }

    /// Image of St_H(m) in W_m = F_p^{p^m}.
    FpSubspace image_in_Wm(int m) const {
        if (m < 0 || m >= depth_) throw std::out_of_range("image_in_Wm needs m < depth");
        FpSubspace U(p_, tree::level_size(p_, m));
        for (std::size_t i = tree::level_offset(p_, m); i < tree::level_offset(p_, m + 1); ++i)
            if (slot_[i] >= 0) U.insert(level_labels(pivots_[static_cast<std::size_t>(slot_[i])], m));
        return U;
    }

    /// An element of St_H(m) whose level-m labels are v.
    Portrait pullback(FpVec v, int m) const {
        const std::size_t off = tree::level_offset(p_, m);
        Portrait g = identity();
        for (std::size_t i = off; i < tree::level_offset(p_, m + 1); ++i) {
            const int s = slot_[i];
            const unsigned c = v[i - off];
            if (s < 0 || c == 0) continue;
            const auto& x = pivots_[static_cast<std::size_t>(s)];
            g = compose(g, powers_[static_cast<std::size_t>(s)][c - 1]);
            fp::axpy(v, level_labels(x, m), p_ - c, p_);
        }
        if (!fp::is_zero(v)) throw std::invalid_argument("pullback: vector not in the image of St_H(m)");
        return g;
    }

    /// Largest m with H inside St(m).
    int max_stab_depth() const {
        for (std::size_t i = 0; i < slot_.size(); ++i)
            if (slot_[i] >= 0) return tree::level_of(p_, i);
        throw std::invalid_argument("max_stab_depth of the trivial subgroup");
    }

    /// Image in the depth-k quotient (k <= depth).
    Subgroup truncated(int k) const {
        std::vector<Portrait> g;
        for (const auto& x : pivots_) g.push_back(treegrp::truncate(x, k));
        return generate(Prime(p_), k, g, limits_);
    }

private:
    struct Task {
        int kind;  // 0 seed, 1 p-th power, 2 commutator, 3 conjugate
        std::size_t i, j;
    };

    void check(const Portrait& g) const {
        if (g.p() != p_ || g.depth() != depth_)
            throw std::invalid_argument("portrait of prime/depth " + std::to_string(g.p()) + "/" + std::to_string(g.depth()) +
                                        " used with subgroup of " + std::to_string(p_) + "/" + std::to_string(depth_));
    }

    void close(const std::vector<Portrait>& seeds, const std::vector<Portrait>& normalizers) {
        std::deque<Task> queue;
        for (std::size_t i = 0; i < seeds.size(); ++i) queue.push_back({0, i, 0});
        std::size_t sifts = 0;
        while (!queue.empty()) {
            const Task t = queue.front();
            queue.pop_front();
            if (++sifts > limits_.max_sifts)
                throw ResourceExceeded("subgroup closure exceeded " + std::to_string(limits_.max_sifts) + " sift operations at depth " +
                                       std::to_string(depth_));
            Portrait g;
            switch (t.kind) {
                case 0: g = seeds[t.i]; break;
                case 1: g = compose(powers_[t.i][p_ - 2], pivots_[t.i]); break;
                case 2: g = commutator(pivots_[t.i], pivots_[t.j]); break;
                default: g = conjugate(pivots_[t.i], normalizers[t.j]); break;
            }
            Portrait r = sift(std::move(g));
            if (r.is_identity()) continue;
            const std::size_t idx = insert(std::move(r));
            queue.push_back({1, idx, 0});
            for (std::size_t k = 0; k < idx; ++k) queue.push_back({2, idx, k});
            for (std::size_t k = 0; k < normalizers.size(); ++k) queue.push_back({3, idx, k});
        }
    }

    std::size_t insert(Portrait r) {
        if (pivots_.size() >= limits_.max_pivots)
            throw ResourceExceeded("subgroup order exceeds p^" + std::to_string(limits_.max_pivots) + " at depth " + std::to_string(depth_));
        const std::size_t pos = r.leading_index();
        const unsigned c = r[pos];
        if (c != 1) r = power(r, fp::inv(c, p_));
        std::vector<Portrait> pw;
        pw.reserve(p_ - 1);
        pw.push_back(r);
        for (unsigned e = 2; e < p_; ++e) pw.push_back(compose(pw.back(), r));
        slot_[pos] = static_cast<int>(pivots_.size());
        pivots_.push_back(std::move(r));
        powers_.push_back(std::move(pw));
        return pivots_.size() - 1;
    }

    unsigned p_ = 2;
    int depth_ = 0;
    EngineLimits limits_;
    std::vector<int> slot_;
    std::vector<Portrait> pivots_;               // insertion order
    std::vector<std::vector<Portrait>> powers_;  // powers_[s][e-1] = pivot^e
    std::vector<Portrait> gens_;
};

// --- derived constructions ---

/// G_n for a catalog group.
inline Subgroup quotient(const GroupInstance& G, int n, EngineLimits limits = {}) {
    return Subgroup::generate(G.prime(), n, G.generators(n), limits);
}

inline Subgroup trivial_subgroup(Prime p, int n, EngineLimits limits = {}) { return Subgroup(p, n, limits); }

/// [A, B] for subgroups normalized by ambient_gens.
inline Subgroup commutator_subgroup(const Subgroup& A, const Subgroup& B, const std::vector<Portrait>& ambient_gens) {
    std::vector<Portrait> seeds;
    const auto ga = A.generators(), gb = B.generators();
    for (const auto& x : ga)
        for (const auto& y : gb) seeds.push_back(commutator(x, y));
    return Subgroup::normal_closure(A.prime(), A.depth(), seeds, ambient_gens, A.limits());
}

/// Normal closure in the group generated by ambient_gens.
inline Subgroup normal_closure(const std::vector<Portrait>& ambient_gens, const std::vector<Portrait>& seeds, EngineLimits limits = {}) {
    if (ambient_gens.empty()) throw std::invalid_argument("normal_closure needs ambient generators");
    return Subgroup::normal_closure(ambient_gens[0].prime(), ambient_gens[0].depth(), seeds, ambient_gens, limits);
}

/// gamma_1 = G, gamma_{k+1} = [gamma_k, G]; stops when the series stabilizes or after k_max terms.
inline std::vector<Subgroup> lower_central(const Subgroup& G, std::size_t k_max) {
    std::vector<Subgroup> out{G};
    const auto gens = G.generators();
    while (out.size() < k_max) {
        Subgroup next = commutator_subgroup(out.back(), G, gens);
        const bool stable = next.exponent() == out.back().exponent();
        out.push_back(std::move(next));
        if (stable) break;
    }
    return out;
}

/// G^(0) = G, G^(k+1) = [G^(k), G^(k)].
inline std::vector<Subgroup> derived_series(const Subgroup& G, std::size_t k_max) {
    std::vector<Subgroup> out{G};
    const auto gens = G.generators();
    while (out.size() < k_max) {
        Subgroup next = commutator_subgroup(out.back(), out.back(), gens);
        const bool stable = next.exponent() == out.back().exponent();
        out.push_back(std::move(next));
        if (stable) break;
    }
    return out;
}

/// Frattini subgroup H^p [H, H].
inline Subgroup frattini(const Subgroup& H) {
    const auto gens = H.generators();
    std::vector<Portrait> seeds;
    for (std::size_t i = 0; i < gens.size(); ++i) {
        seeds.push_back(power(gens[i], H.p()));
        for (std::size_t j = 0; j < i; ++j) seeds.push_back(commutator(gens[i], gens[j]));
    }
    return Subgroup::normal_closure(H.prime(), H.depth(), seeds, gens, H.limits());
}

/// d(H) = log_p |H : Phi(H)|.
inline std::size_t min_generators(const Subgroup& H) { return H.exponent() - frattini(H).exponent(); }

/// Point stabilizer st_H(v).
inline Subgroup vertex_stabilizer(const Subgroup& H, const Vertex& v) {
    v.validate(H.p());
    const unsigned p = H.p();
    Subgroup K = H;
    std::vector<unsigned> prefix;
    for (int i = 0; i < v.level(); ++i) {
        const Vertex u(prefix);
        prefix.push_back(v[static_cast<std::size_t>(i)]);
        if (K.is_trivial() || K.max_stab_depth() > i) continue;
        // K fixes u; its action on the children of u is the label at u, a homomorphism to F_p.
        const std::size_t at = u.global_index(p);
        auto gens = K.pivots();
        std::size_t i0 = gens.size();
        for (std::size_t k = 0; k < gens.size(); ++k)
            if (gens[k][at] != 0) {
                i0 = k;
                break;
            }
        if (i0 == gens.size()) continue;
        const Portrait q = power(gens[i0], fp::inv(gens[i0][at], p));
        std::vector<Portrait> seeds{power(q, p)};
        for (std::size_t k = 0; k < gens.size(); ++k) {
            if (k == i0) continue;
            const unsigned c = gens[k][at];
            seeds.push_back(c ? compose(gens[k], power(q, -static_cast<long long>(c))) : gens[k]);
        }
        K = Subgroup::normal_closure(H.prime(), H.depth(), seeds, {q}, H.limits());
    }
    return K;
}

/// phi_v(st_H(v)) as a subgroup of depth n - |v|.
inline Subgroup section_subgroup(const Subgroup& H, const Vertex& v) {
    const Subgroup K = vertex_stabilizer(H, v);
    std::vector<Portrait> secs;
    for (const auto& x : K.pivots()) secs.push_back(section(x, v));
    return Subgroup::generate(H.prime(), H.depth() - v.level(), secs, H.limits());
}

/// psi^-1(K x ... x K) at depth |w|+depth(K), generated by one-coordinate embeddings at the level of w.
inline Subgroup coordinate_product(const Subgroup& K, int level) {
    std::vector<Portrait> gens;
    const auto kg = K.generators();
    const std::size_t count = tree::level_size(K.p(), level);
    for (std::size_t i = 0; i < count; ++i) {
        const Vertex w = Vertex::from_index(K.p(), level, i);
        for (const auto& x : kg) gens.push_back(embed_at(x, w));
    }
    return Subgroup::generate(K.prime(), K.depth() + level, gens, K.limits());
}

/// For every generator of K_short (depth n-1) and every first-level coordinate,
/// the one-coordinate element lies in K_full (depth n). Returns the first failure.
inline std::optional<Portrait> regular_branch_witness(const Subgroup& K_full, const Subgroup& K_short) {
    if (K_short.depth() + 1 != K_full.depth()) throw std::invalid_argument("regular_branch check needs depths n and n-1");
    for (const auto& x : K_short.generators())
        for (unsigned c = 1; c <= K_full.p(); ++c) {
            Portrait e = embed_at(x, Vertex({c}));
            if (!K_full.contains(e)) return e;
        }
    return std::nullopt;
}

inline bool is_regular_branch_over(const Subgroup& K_full, const Subgroup& K_short) {
    return !regular_branch_witness(K_full, K_short).has_value();
}

/// For every level m < n and every level-m vertex u: phi_u(St_G(m)) = G_{n-m}.
inline bool is_super_strongly_fractal(const GroupInstance& G, int n, EngineLimits limits = {}) {
    const Subgroup Gn = quotient(G, n, limits);
    for (int m = 1; m < n; ++m) {
        const Subgroup St = Gn.stabilizer(m);
        const Subgroup target = quotient(G, n - m, limits);
        for (std::size_t i = 0; i < tree::level_size(G.p(), m); ++i) {
            const Vertex u = Vertex::from_index(G.p(), m, i);
            if (!(section_subgroup(St, u) == target)) return false;
        }
    }
    return true;
}

/// Each coordinate projection of psi(G' ∩ St(1)) is all of G_{n-1}.
inline bool is_subdirect_psi_derived(const GroupInstance& G, int n, EngineLimits limits = {}) {
    const Subgroup Gn = quotient(G, n, limits);
    const Subgroup D = commutator_subgroup(Gn, Gn, Gn.generators()).stabilizer(1);
    const Subgroup target = quotient(G, n - 1, limits);
    for (unsigned c = 1; c <= G.p(); ++c) {
        std::vector<Portrait> secs;
        for (const auto& x : D.pivots()) secs.push_back(section(x, Vertex({c})));
        if (!(Subgroup::generate(G.prime(), n - 1, secs, limits) == target)) return false;
    }
    return true;
}

}  // namespace treegrp
