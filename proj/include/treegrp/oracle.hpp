#pragma once

// Brute-force referees for the fast paths: element enumeration, submodule
// enumeration, and enumeration of normal subgroups between consecutive level
// stabilizers. Exceeding a cap throws OracleCapExceeded; callers report such
// cases as skipped.

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "fp_linalg.hpp"
#include "fpg_modules.hpp"
#include "quotient_engine.hpp"
#include "tree_core.hpp"

namespace treegrp::oracle {

class OracleCapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Enumeration {
    std::size_t count = 0;
    std::size_t exponent = 0;
    std::unordered_set<Portrait, PortraitHash> elements;
};

/// Closure of gens under right multiplication by the generators.
inline Enumeration bfs_enumerate(const std::vector<Portrait>& gens, Prime p, int depth, std::size_t cap_exp = 12) {
    const std::size_t cap = tree::ipow(p.value(), static_cast<int>(cap_exp));
    Enumeration e;
    std::vector<Portrait> frontier{Portrait(p, depth)};
    e.elements.insert(frontier.front());
    while (!frontier.empty()) {
        std::vector<Portrait> next;
        for (const auto& x : frontier)
            for (const auto& g : gens) {
                Portrait y = compose(x, g);
                if (e.elements.insert(y).second) {
                    if (e.elements.size() > cap)
                        throw OracleCapExceeded("group has more than p^" + std::to_string(cap_exp) + " elements");
                    next.push_back(std::move(y));
                }
            }
        frontier = std::move(next);
    }
    e.count = e.elements.size();
    std::size_t c = e.count;
    while (c % p.value() == 0) {
        c /= p.value();
        ++e.exponent;
    }
    if (c != 1) throw std::logic_error("enumerated group order is not a power of p");
    return e;
}

/// Every nonzero submodule: closures of single vectors, then sums until stable.
inline std::vector<FpSubspace> brute_submodules(const GModule& M, std::size_t cap_vectors = 20000) {
    const unsigned p = M.p;
    if (static_cast<double>(tree::ipow(p, static_cast<int>(M.dim))) > static_cast<double>(cap_vectors))
        throw OracleCapExceeded("module too large for exhaustive submodule search");
    std::map<std::string, FpSubspace> found;
    FpVec v(M.dim, 0);
    const std::size_t total = tree::ipow(p, static_cast<int>(M.dim));
    for (std::size_t idx = 1; idx < total; ++idx) {
        std::size_t x = idx;
        for (std::size_t i = 0; i < M.dim; ++i) {
            v[i] = static_cast<std::uint8_t>(x % p);
            x /= p;
        }
        // skip non-normalized scalar multiples: first nonzero entry must be 1
        auto lead = std::find_if(v.begin(), v.end(), [](auto c) { return c != 0; });
        if (*lead != 1) continue;
        FpSubspace S = submodule_closure(v, M);
        found.emplace(S.key(), std::move(S));
    }
    bool grew = true;
    while (grew) {
        grew = false;
        std::vector<FpSubspace> cur;
        for (const auto& [k, s] : found) cur.push_back(s);
        for (std::size_t i = 0; i < cur.size(); ++i)
            for (std::size_t j = i + 1; j < cur.size(); ++j) {
                FpSubspace S = cur[i] + cur[j];
                grew = found.emplace(S.key(), std::move(S)).second || grew;
            }
    }
    std::vector<FpSubspace> out;
    for (auto& [k, s] : found) out.push_back(std::move(s));
    std::stable_sort(out.begin(), out.end(), [](const FpSubspace& a, const FpSubspace& b) { return a.dim() < b.dim(); });
    return out;
}

inline bool totally_ordered(const std::vector<FpSubspace>& subs) {
    for (std::size_t i = 0; i < subs.size(); ++i)
        for (std::size_t j = 0; j < subs.size(); ++j)
            if (!subs[i].contains(subs[j]) && !subs[j].contains(subs[i])) return false;
    return true;
}

struct NormalBetween {
    std::vector<Subgroup> subgroups;   // St(m+1) .. St(m), sorted by order
    std::vector<FpSubspace> images;    // their images in W_m
    bool all_normal = true;
};

/// All normal subgroups N of G_n with St(m+1) <= N <= St(m), found by normal
/// closures inside the group (not via the module action) and their products.
inline NormalBetween brute_normal_between(const Subgroup& Gn, int m, std::size_t cap_t = 6) {
    if (Gn.depth() < m + 1) throw std::invalid_argument("brute_normal_between needs depth >= m + 1");
    const auto gens = Gn.generators();
    const Subgroup top = Gn.stabilizer(m);
    const Subgroup bottom = Gn.stabilizer(m + 1);
    const FpSubspace U = Gn.image_in_Wm(m);
    const std::size_t t = U.dim();
    if (t > cap_t) throw OracleCapExceeded("t(m) = " + std::to_string(t) + " exceeds the cap " + std::to_string(cap_t));
    const unsigned p = Gn.p();

    std::map<std::string, std::pair<FpSubspace, Subgroup>> found;
    auto record = [&](const Subgroup& N) {
        FpSubspace img = N.exponent() == bottom.exponent() ? FpSubspace(p, U.ambient()) : N.image_in_Wm(m);
        const std::string key = img.key();
        if (!found.count(key)) found.emplace(key, std::make_pair(std::move(img), N));
    };
    record(bottom);
    record(top);
    const std::size_t total = tree::ipow(p, static_cast<int>(t));
    for (std::size_t idx = 1; idx < total; ++idx) {
        std::vector<unsigned> coef(t);
        std::size_t x = idx;
        for (std::size_t i = 0; i < t; ++i) {
            coef[i] = static_cast<unsigned>(x % p);
            x /= p;
        }
        auto lead = std::find_if(coef.begin(), coef.end(), [](unsigned c) { return c != 0; });
        if (*lead != 1) continue;
        FpVec v(U.ambient(), 0);
        for (std::size_t i = 0; i < t; ++i) fp::axpy(v, U.basis()[i], coef[i], p);
        record(bottom.extended({top.pullback(v, m)}, gens));
    }
    bool grew = true;
    while (grew) {
        grew = false;
        std::vector<Subgroup> cur;
        for (const auto& [k, e] : found) cur.push_back(e.second);
        for (std::size_t i = 0; i < cur.size(); ++i)
            for (std::size_t j = i + 1; j < cur.size(); ++j) {
                const Subgroup prod = cur[i].extended(cur[j].pivots(), gens);
                const std::size_t before = found.size();
                record(prod);
                grew = grew || found.size() != before;
            }
    }
    NormalBetween out;
    for (auto& [k, e] : found) {
        out.all_normal = out.all_normal && e.second.is_normalized_by(gens);
        out.images.push_back(e.first);
        out.subgroups.push_back(e.second);
    }
    std::vector<std::size_t> order(out.images.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return out.images[a].dim() < out.images[b].dim(); });
    NormalBetween sorted;
    sorted.all_normal = out.all_normal;
    for (auto i : order) {
        sorted.images.push_back(out.images[i]);
        sorted.subgroups.push_back(out.subgroups[i]);
    }
    return sorted;
}

}  // namespace treegrp::oracle
