#pragma once

// Group families acting on the p-adic tree: GGS, multi-GGS, multi-EGS,
// Sunic and Fabrykowski-Gupta groups. Each family instance knows how to emit
// its generators at any depth, and answers the classification questions
// (torsion, branch type, congruence subgroup property, class E, ranks).

#include <algorithm>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "fp_linalg.hpp"
#include "tree_core.hpp"

namespace treegrp {

using DefiningVector = FpVec;

inline bool is_symmetric(const DefiningVector& e) {
    const std::size_t n = e.size();
    for (std::size_t i = 0; i < n; ++i)
        if (e[i] != e[n - 1 - i]) return false;
    return true;
}

inline bool is_constant(const DefiningVector& e) {
    return !e.empty() && e[0] != 0 && std::all_of(e.begin(), e.end(), [&](auto x) { return x == e[0]; });
}

inline unsigned entry_sum(const DefiningVector& e, unsigned p) {
    unsigned s = 0;
    for (auto x : e) s = (s + x) % p;
    return s;
}

/// Families E^(1..p); families[j-1] lists the defining vectors for the directed path through p-j+1.
struct MultiEGSSpec {
    unsigned p = 3;
    std::vector<std::vector<DefiningVector>> families;

    std::size_t r_G() const {
        std::size_t r = 0;
        for (const auto& f : families) r += f.size();
        return r;
    }

    /// Concatenation of all family systems, in family order.
    std::vector<DefiningVector> concatenated() const {
        std::vector<DefiningVector> out;
        for (const auto& f : families) out.insert(out.end(), f.begin(), f.end());
        return out;
    }

    std::size_t r_dot() const { return rank(p, concatenated()); }

    void validate() const {
        Prime pr(p);
        if (!pr.is_odd()) throw std::invalid_argument("multi-EGS groups need an odd prime");
        if (families.size() != p) throw std::invalid_argument("expected one (possibly empty) family per j = 1..p");
        bool any = false;
        for (std::size_t j = 0; j < families.size(); ++j) {
            const auto& fam = families[j];
            if (fam.size() > p - 1) throw std::invalid_argument("family j=" + std::to_string(j + 1) + " has more than p-1 vectors");
            for (const auto& v : fam) {
                if (v.size() != p - 1)
                    throw std::invalid_argument("defining vector in family j=" + std::to_string(j + 1) + " must have p-1 entries");
                if (fp::is_zero(v)) throw std::invalid_argument("zero defining vector in family j=" + std::to_string(j + 1));
                for (auto x : v)
                    if (x >= p) throw std::invalid_argument("defining vector entry not reduced mod p");
            }
            if (rank(p, fam) != fam.size())
                throw std::invalid_argument("defining vectors of family j=" + std::to_string(j + 1) + " are linearly dependent");
            any = any || !fam.empty();
        }
        if (!any) throw std::invalid_argument("at least one family must be nonempty");
    }

    bool is_multi_ggs() const {
        for (std::size_t j = 1; j < families.size(); ++j)
            if (!families[j].empty()) return false;
        return true;
    }
};

struct SunicSpec {
    unsigned p = 2;
    std::vector<unsigned> coeffs;  // alpha_0 .. alpha_{r-1}

    std::size_t r() const { return coeffs.size(); }

    void validate() const {
        Prime pr(p);
        if (coeffs.empty()) throw std::invalid_argument("Sunic polynomial needs degree >= 1");
        for (auto c : coeffs)
            if (c >= p) throw std::invalid_argument("polynomial coefficient not reduced mod p");
        if (coeffs[0] == 0) throw std::invalid_argument("Sunic polynomial needs alpha_0 != 0");
    }

    bool regular_branch() const { return p % 2 == 1 || r() >= 2; }
};

enum class BranchType { OverDerived, OverGamma3NotDerived, NotRegularBranch, Unclassified };

inline std::string to_string(BranchType t) {
    switch (t) {
        case BranchType::OverDerived: return "OverDerived";
        case BranchType::OverGamma3NotDerived: return "OverGamma3NotDerived";
        case BranchType::NotRegularBranch: return "NotRegularBranch";
        case BranchType::Unclassified: return "Unclassified";
    }
    return "?";
}

// --- classification of multi-EGS systems ---

inline bool is_torsion(const MultiEGSSpec& s) {
    for (const auto& fam : s.families)
        for (const auto& v : fam)
            if (entry_sum(v, s.p) != 0) return false;
    return true;
}

inline std::size_t r_dot(const MultiEGSSpec& s) { return s.r_dot(); }

inline BranchType branch_type(const MultiEGSSpec& s) {
    const auto all = s.concatenated();
    if (all.empty()) return BranchType::Unclassified;
    for (const auto& v : all)
        if (!is_symmetric(v)) return BranchType::OverDerived;
    if (rank(s.p, all) >= 2) return BranchType::OverDerived;
    // all vectors are scalar multiples of one symmetric vector, at most one per family
    if (!is_constant(all.front())) return BranchType::OverGamma3NotDerived;
    if (all.size() == 1) return BranchType::NotRegularBranch;
    return BranchType::Unclassified;
}

inline bool in_class_E(const MultiEGSSpec& s) {
    if (s.r_G() != 2) return false;
    std::vector<std::size_t> js;
    for (std::size_t j = 0; j < s.families.size(); ++j)
        if (!s.families[j].empty()) js.push_back(j);
    if (js.size() != 2) return false;
    const auto& e = s.families[js[0]][0];
    const auto& f = s.families[js[1]][0];
    if (!is_symmetric(e) || !is_symmetric(f)) return false;
    const unsigned p = s.p;
    for (unsigned lam = 1; lam < p; ++lam)
        for (unsigned mu = 1; mu < p; ++mu) {
            bool ok = true;
            for (std::size_t i = 0; i < e.size() && ok; ++i) {
                const unsigned x = e[i] * lam % p, y = f[i] * mu % p;
                ok = x <= 1 && y <= 1 && x != y;
            }
            if (ok) return true;
        }
    return false;
}

inline bool has_csp(const MultiEGSSpec& s) {
    if (in_class_E(s)) return false;
    const BranchType t = branch_type(s);
    if (t == BranchType::OverDerived) return s.r_dot() == s.r_G();
    if (t == BranchType::OverGamma3NotDerived) return s.r_G() == 2;
    return false;
}

// --- words and generator recursion ---

struct Letter {
    int gen;  // index into the generator list (0 = a)
    int exp;
};
using Word = std::vector<Letter>;

inline Word word_inverse(const Word& w) {
    Word out;
    for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back({it->gen, -it->exp});
    return out;
}

inline Word word_concat(Word x, const Word& y) {
    x.insert(x.end(), y.begin(), y.end());
    return x;
}

/// g^(a^k) as a word.
inline Word word_conj_a(const Word& g, int k) {
    return word_concat(word_concat(Word{{0, -k}}, g), Word{{0, k}});
}

inline Portrait evaluate(const Word& w, const std::vector<Portrait>& gens) {
    if (gens.empty()) throw std::invalid_argument("evaluate: empty generator list");
    Portrait acc(gens[0].prime(), gens[0].depth());
    for (const auto& l : w) {
        if (l.gen < 0 || static_cast<std::size_t>(l.gen) >= gens.size()) throw std::out_of_range("word letter out of range");
        if (l.exp != 0) acc = compose(acc, power(gens[static_cast<std::size_t>(l.gen)], l.exp));
    }
    return acc;
}

/// psi-image of one generator: root label plus one word per first-level coordinate.
struct GenRule {
    unsigned root = 0;
    std::vector<Word> coords;
};

enum class FamilyKind { FG, GGS, MultiGGS, MultiEGS, Sunic };

inline std::string to_string(FamilyKind k) {
    switch (k) {
        case FamilyKind::FG: return "fg";
        case FamilyKind::GGS: return "ggs";
        case FamilyKind::MultiGGS: return "multi_ggs";
        case FamilyKind::MultiEGS: return "multi_egs";
        case FamilyKind::Sunic: return "sunic";
    }
    return "?";
}

class GroupInstance {
public:
    GroupInstance(FamilyKind kind, MultiEGSSpec spec) : kind_(kind), p_(spec.p), spec_(std::move(spec)) {
        const auto& s = std::get<MultiEGSSpec>(spec_);
        s.validate();
        const unsigned p = p_;
        names_.push_back("a");
        rules_.push_back(rooted_rule());
        directed_.push_back({0, 0});
        const bool single = s.r_G() == 1;
        for (unsigned j = 1; j <= p; ++j) {
            const auto& fam = s.families[j - 1];
            for (std::size_t i = 0; i < fam.size(); ++i) {
                const int self = static_cast<int>(rules_.size());
                GenRule g;
                g.coords.resize(p);
                const unsigned home = p - j + 1;
                for (unsigned c = 1; c <= p; ++c) {
                    if (c == home) {
                        g.coords[c - 1] = {{self, 1}};
                    } else {
                        const unsigned k = (c + p - home) % p;
                        const unsigned e = fam[i][k - 1];
                        if (e) g.coords[c - 1] = {{0, static_cast<int>(e)}};
                    }
                }
                rules_.push_back(std::move(g));
                directed_.push_back({j, static_cast<unsigned>(i + 1)});
                if (single)
                    names_.push_back("b");
                else if (s.is_multi_ggs())
                    names_.push_back("b" + std::to_string(i + 1));
                else
                    names_.push_back("b" + std::to_string(i + 1) + "^(" + std::to_string(j) + ")");
            }
        }
    }

    GroupInstance(SunicSpec spec) : kind_(FamilyKind::Sunic), p_(spec.p), spec_(std::move(spec)) {
        const auto& s = std::get<SunicSpec>(spec_);
        s.validate();
        const unsigned p = p_;
        const int r = static_cast<int>(s.r());
        names_.push_back("a");
        rules_.push_back(rooted_rule());
        directed_.push_back({0, 0});
        for (int i = 1; i <= r; ++i) {
            GenRule g;
            g.coords.resize(p);
            if (i < r) {
                g.coords[p - 1] = {{i + 1, 1}};
            } else {
                g.coords[0] = {{0, 1}};
                Word w;
                for (int k = 0; k < r; ++k) {
                    const int e = static_cast<int>((p - s.coeffs[static_cast<std::size_t>(k)]) % p);
                    if (e) w.push_back({k + 1, e});
                }
                g.coords[p - 1] = w;
            }
            rules_.push_back(std::move(g));
            directed_.push_back({0, static_cast<unsigned>(i)});
            names_.push_back("b" + std::to_string(i));
        }
    }

    FamilyKind kind() const { return kind_; }
    unsigned p() const { return p_; }
    Prime prime() const { return Prime(p_); }
    std::size_t num_generators() const { return rules_.size(); }
    std::size_t r_G() const { return rules_.size() - 1; }
    const std::vector<std::string>& names() const { return names_; }
    const std::vector<GenRule>& rules() const { return rules_; }

    bool is_sunic() const { return kind_ == FamilyKind::Sunic; }
    const MultiEGSSpec& egs() const { return std::get<MultiEGSSpec>(spec_); }
    const SunicSpec& sunic() const { return std::get<SunicSpec>(spec_); }

    /// For multi-EGS generators: (family j, index i); (0,0) for a; (0,i) for Sunic b_i.
    std::pair<unsigned, unsigned> directed_index(std::size_t g) const { return directed_[g]; }

    /// Generator portraits a, b_1, ... at depth n.
    std::vector<Portrait> generators(int depth) const {
        if (depth < 0) throw std::invalid_argument("negative depth");
        const Prime pr(p_);
        std::vector<Portrait> cur(rules_.size(), Portrait(pr, 0));
        for (int d = 1; d <= depth; ++d) {
            std::vector<Portrait> next;
            next.reserve(rules_.size());
            for (const auto& rule : rules_) {
                std::vector<Portrait> secs;
                secs.reserve(p_);
                for (const auto& w : rule.coords) secs.push_back(evaluate(w, cur));
                next.push_back(assemble(rule.root, secs));
            }
            cur = std::move(next);
        }
        return cur;
    }

    Portrait generator(std::size_t g, int depth) const { return generators(depth).at(g); }

    // classification (multi-EGS families)
    bool is_torsion() const {
        if (is_sunic()) throw std::logic_error("the torsion criterion is stated for multi-EGS groups");
        return treegrp::is_torsion(egs());
    }

    BranchType branch_type() const {
        // odd p: branch over G'; p = 2, r >= 2: branch over K, which has no tag of its own
        if (is_sunic()) {
            if (!sunic().regular_branch()) return BranchType::NotRegularBranch;
            return p_ % 2 ? BranchType::OverDerived : BranchType::Unclassified;
        }
        return treegrp::branch_type(egs());
    }

    std::size_t r_dot() const { return is_sunic() ? 0 : egs().r_dot(); }
    bool in_class_E() const { return !is_sunic() && treegrp::in_class_E(egs()); }
    bool has_csp() const {
        if (is_sunic()) return sunic().regular_branch();
        return treegrp::has_csp(egs());
    }

    /// True for one-vector multi-EGS groups along the path through p (the GGS groups).
    bool is_ggs() const { return !is_sunic() && egs().r_G() == 1 && !egs().families[0].empty(); }
    bool is_fg() const {
        if (!is_ggs()) return false;
        const auto& e = egs().families[0][0];
        return e[0] == 1 && std::all_of(e.begin() + 1, e.end(), [](auto x) { return x == 0; });
    }

private:
    GenRule rooted_rule() const {
        GenRule g;
        g.root = 1;
        g.coords.resize(p_);
        return g;
    }

    FamilyKind kind_;
    unsigned p_;
    std::variant<MultiEGSSpec, SunicSpec> spec_;
    std::vector<GenRule> rules_;
    std::vector<std::string> names_;
    std::vector<std::pair<unsigned, unsigned>> directed_;
};

inline GroupInstance make_ggs(unsigned p, DefiningVector e) {
    Prime pr(p);
    if (!pr.is_odd()) throw std::invalid_argument("GGS groups need an odd prime");
    if (e.size() != p - 1) throw std::invalid_argument("GGS vector must have p-1 entries");
    if (fp::is_zero(e)) throw std::invalid_argument("GGS defining vector must be nonzero");
    MultiEGSSpec s{p, std::vector<std::vector<DefiningVector>>(p)};
    s.families[0].push_back(std::move(e));
    return GroupInstance(FamilyKind::GGS, std::move(s));
}

inline GroupInstance make_fg(unsigned p) {
    Prime pr(p);
    if (!pr.is_odd()) throw std::invalid_argument("Fabrykowski-Gupta groups need an odd prime");
    DefiningVector e(p - 1, 0);
    e[0] = 1;
    MultiEGSSpec s{p, std::vector<std::vector<DefiningVector>>(p)};
    s.families[0].push_back(std::move(e));
    return GroupInstance(FamilyKind::FG, std::move(s));
}

inline GroupInstance make_multi_ggs(unsigned p, std::vector<DefiningVector> vectors) {
    MultiEGSSpec s{p, std::vector<std::vector<DefiningVector>>(p)};
    s.families[0] = std::move(vectors);
    return GroupInstance(FamilyKind::MultiGGS, std::move(s));
}

inline GroupInstance make_multi_egs(MultiEGSSpec spec) { return GroupInstance(FamilyKind::MultiEGS, std::move(spec)); }

inline GroupInstance make_sunic(unsigned p, std::vector<unsigned> coeffs) { return GroupInstance(SunicSpec{p, std::move(coeffs)}); }

/// The multi-GGS group on the concatenated system of a multi-EGS group, with
/// a dependent system replaced by a basis of its span.
inline GroupInstance concatenated_multi_ggs(const MultiEGSSpec& s) {
    FpSubspace span = FpSubspace::span(s.p, s.p - 1, s.concatenated());
    std::vector<DefiningVector> basis;
    if (span.dim() == s.r_G())
        basis = s.concatenated();
    else
        basis = span.basis();
    return make_multi_ggs(s.p, std::move(basis));
}

/// Shape data for groups with one symmetric non-constant vector e shared by
/// single-vector families j_1 < ... < j_r, 2 <= r <= p.
struct AppBShape {
    std::vector<unsigned> js;
    DefiningVector e;
};

inline std::optional<AppBShape> appB_shape(const GroupInstance& g) {
    if (g.is_sunic()) return std::nullopt;
    const auto& s = g.egs();
    AppBShape shape;
    for (unsigned j = 1; j <= s.p; ++j) {
        const auto& fam = s.families[j - 1];
        if (fam.empty()) continue;
        if (fam.size() != 1) return std::nullopt;
        if (shape.js.empty())
            shape.e = fam[0];
        else if (fam[0] != shape.e)
            return std::nullopt;
        shape.js.push_back(j);
    }
    if (shape.js.size() < 2 || !is_symmetric(shape.e) || is_constant(shape.e)) return std::nullopt;
    return shape;
}

/// Normal generators of D: for every alpha in F_p^{r-1} with
/// sum (j_i - j_1) alpha_i = 0, the word prod_i (b_1^-1 b_i^(a^(j_i - j_1)))^alpha_i.
inline std::vector<Word> appB_D_generators(const GroupInstance& g) {
    auto shape = appB_shape(g);
    if (!shape) throw std::invalid_argument("group does not have the shared symmetric-vector shape");
    const unsigned p = g.p();
    const auto& js = shape->js;
    const std::size_t r = js.size();
    std::vector<Word> out;
    std::vector<unsigned> alpha(r - 1, 0);
    while (true) {
        unsigned s = 0;
        for (std::size_t i = 1; i < r; ++i) s = (s + (js[i] - js[0]) * alpha[i - 1]) % p;
        if (s == 0) {
            Word w;
            for (std::size_t i = 1; i < r; ++i) {
                Word factor = word_concat(Word{{1, -1}}, word_conj_a(Word{{static_cast<int>(i + 1), 1}}, static_cast<int>(js[i] - js[0])));
                for (unsigned t = 0; t < alpha[i - 1]; ++t) w = word_concat(w, factor);
            }
            out.push_back(std::move(w));
        }
        std::size_t k = 0;
        while (k < alpha.size() && ++alpha[k] == p) alpha[k++] = 0;
        if (k == alpha.size()) break;
    }
    return out;
}

}  // namespace treegrp
