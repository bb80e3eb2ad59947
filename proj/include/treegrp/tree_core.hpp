#pragma once

// Automorphisms of the p-adic rooted tree truncated at finite depth, restricted
// to the Sylow pro-p subgroup: every label is a power of the rooted p-cycle a.
//
// A portrait of depth n stores one exponent in {0,...,p-1} per vertex of the
// levels 0..n-1. Vertices are numbered breadth-first, lexicographically inside
// each level: the level-m vertex x_1...x_m (letters in 1..p) has local index
// sum (x_k - 1) p^(m-k) and global index (p^m - 1)/(p - 1) + local index.
//
// Right action: (ux)^f = u^f x^{f(u)}, where the letter x (as digit x-1) is
// shifted by the label f(u). Composition fg means "first f, then g".

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace treegrp {

using Label = std::uint8_t;

class Prime {
public:
    constexpr Prime() = default;
    explicit Prime(unsigned value) : value_(value) {
        if (value < 2) throw std::invalid_argument("prime must be >= 2, got " + std::to_string(value));
        for (unsigned d = 2; d * d <= value; ++d)
            if (value % d == 0) throw std::invalid_argument(std::to_string(value) + " is not prime");
        if (value > 251) throw std::invalid_argument("prime too large for 8-bit labels");
    }

    constexpr unsigned value() const { return value_; }
    constexpr operator unsigned() const { return value_; }
    constexpr bool is_odd() const { return value_ % 2 == 1; }

private:
    unsigned value_ = 2;
};

namespace tree {

inline std::size_t ipow(std::size_t base, int e) {
    std::size_t r = 1;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

/// Number of vertices at level m.
inline std::size_t level_size(unsigned p, int m) { return ipow(p, m); }

/// Global index of the first vertex of level m; also the number of vertices above level m.
inline std::size_t level_offset(unsigned p, int m) {
    std::size_t off = 0, sz = 1;
    for (int i = 0; i < m; ++i) {
        off += sz;
        sz *= p;
    }
    return off;
}

inline std::size_t label_count(unsigned p, int depth) { return level_offset(p, depth); }

/// Level of a global vertex index.
inline int level_of(unsigned p, std::size_t global) {
    int m = 0;
    std::size_t off = 0, sz = 1;
    while (global >= off + sz) {
        off += sz;
        sz *= p;
        ++m;
    }
    return m;
}

}  // namespace tree

/// A vertex of the p-adic tree, stored as its word over {1,...,p}.
class Vertex {
public:
    Vertex() = default;
    explicit Vertex(std::vector<unsigned> letters) : letters_(std::move(letters)) {}

    /// Parses a word such as "312"; letters are single characters 1-9, then a-z for 10...
    static Vertex parse(std::string_view word) {
        std::vector<unsigned> letters;
        for (char c : word) {
            if (c >= '1' && c <= '9')
                letters.push_back(static_cast<unsigned>(c - '0'));
            else if (c >= 'a' && c <= 'z')
                letters.push_back(static_cast<unsigned>(c - 'a' + 10));
            else
                throw std::invalid_argument("bad vertex letter '" + std::string(1, c) + "'");
        }
        return Vertex(std::move(letters));
    }

    /// The constant word x...x of length n.
    static Vertex repeated(unsigned letter, int n) { return Vertex(std::vector<unsigned>(static_cast<std::size_t>(n), letter)); }

    /// The level-m vertex with the given local (lexicographic) index.
    static Vertex from_index(unsigned p, int m, std::size_t local) {
        std::vector<unsigned> letters(static_cast<std::size_t>(m));
        for (int k = m - 1; k >= 0; --k) {
            letters[static_cast<std::size_t>(k)] = static_cast<unsigned>(local % p) + 1;
            local /= p;
        }
        return Vertex(std::move(letters));
    }

    int level() const { return static_cast<int>(letters_.size()); }
    const std::vector<unsigned>& letters() const { return letters_; }
    unsigned operator[](std::size_t i) const { return letters_[i]; }

    void validate(unsigned p) const {
        for (unsigned x : letters_)
            if (x < 1 || x > p) throw std::invalid_argument("vertex letter out of range 1.." + std::to_string(p));
    }

    std::size_t local_index(unsigned p) const {
        std::size_t idx = 0;
        for (unsigned x : letters_) idx = idx * p + (x - 1);
        return idx;
    }

    std::size_t global_index(unsigned p) const { return tree::level_offset(p, level()) + local_index(p); }

    Vertex child(unsigned letter) const {
        auto l = letters_;
        l.push_back(letter);
        return Vertex(std::move(l));
    }

    std::string str() const {
        std::string s;
        for (unsigned x : letters_) s.push_back(x < 10 ? static_cast<char>('0' + x) : static_cast<char>('a' + x - 10));
        return s;
    }

    friend bool operator==(const Vertex&, const Vertex&) = default;

private:
    std::vector<unsigned> letters_;
};

class Portrait {
public:
    Portrait() = default;

    /// Identity of the depth-n quotient.
    Portrait(Prime p, int depth) : p_(p.value()), depth_(depth), labels_(tree::label_count(p.value(), depth), 0) {
        if (depth < 0) throw std::invalid_argument("negative depth");
    }

    static Portrait from_labels(Prime p, int depth, std::vector<Label> labels) {
        Portrait f(p, depth);
        if (labels.size() != f.labels_.size())
            throw std::invalid_argument("label count " + std::to_string(labels.size()) + " does not match depth " +
                                        std::to_string(depth));
        for (Label l : labels)
            if (l >= p.value()) throw std::invalid_argument("label out of range");
        f.labels_ = std::move(labels);
        return f;
    }

    unsigned p() const { return p_; }
    Prime prime() const { return Prime(p_); }
    int depth() const { return depth_; }
    std::size_t size() const { return labels_.size(); }

    Label operator[](std::size_t global) const { return labels_[global]; }
    Label& operator[](std::size_t global) { return labels_[global]; }
    Label label(const Vertex& u) const { return labels_[u.global_index(p_)]; }

    std::span<const Label> labels() const { return labels_; }
    std::span<Label> labels() { return labels_; }

    bool is_identity() const {
        return std::all_of(labels_.begin(), labels_.end(), [](Label l) { return l == 0; });
    }

    /// Index of the first nonzero label in breadth-lex order, or size() for the identity.
    std::size_t leading_index(std::size_t from = 0) const {
        for (std::size_t i = from; i < labels_.size(); ++i)
            if (labels_[i] != 0) return i;
        return labels_.size();
    }

    /// Smallest level carrying a nonzero label, or depth() for the identity.
    int first_nonzero_level() const {
        std::size_t lead = leading_index();
        return lead == labels_.size() ? depth_ : tree::level_of(p_, lead);
    }

    /// Flat base-p digit string of all labels in breadth-lex order.
    std::string digits() const {
        std::string s;
        s.reserve(labels_.size());
        for (Label l : labels_) s.push_back(l < 10 ? static_cast<char>('0' + l) : static_cast<char>('a' + l - 10));
        return s;
    }

    static Portrait from_digits(Prime p, int depth, std::string_view digits) {
        std::vector<Label> labels;
        labels.reserve(digits.size());
        for (char c : digits) {
            if (c >= '0' && c <= '9')
                labels.push_back(static_cast<Label>(c - '0'));
            else if (c >= 'a' && c <= 'z')
                labels.push_back(static_cast<Label>(c - 'a' + 10));
            else
                throw std::invalid_argument("bad label digit");
        }
        return from_labels(p, depth, std::move(labels));
    }

    friend bool operator==(const Portrait& a, const Portrait& b) {
        return a.p_ == b.p_ && a.depth_ == b.depth_ && a.labels_ == b.labels_;
    }

private:
    unsigned p_ = 2;
    int depth_ = 0;
    std::vector<Label> labels_;
};

struct PortraitHash {
    std::size_t operator()(const Portrait& f) const noexcept {
        std::uint64_t h = 1469598103934665603ULL;
        for (Label l : f.labels()) {
            h ^= l;
            h *= 1099511628211ULL;
        }
        return static_cast<std::size_t>(h);
    }
};

namespace detail {

inline void require_compatible(const Portrait& f, const Portrait& g) {
    if (f.p() != g.p() || f.depth() != g.depth())
        throw std::invalid_argument("portraits differ in prime or depth (" + std::to_string(f.p()) + "/" +
                                    std::to_string(f.depth()) + " vs " + std::to_string(g.p()) + "/" +
                                    std::to_string(g.depth()) + ")");
}

// Calls visit(level, local index, local index of image) for every vertex in
// breadth-lex order; images are those under f.
template <class Visit>
void for_each_image(const Portrait& f, Visit&& visit) {
    const unsigned p = f.p();
    thread_local std::vector<std::size_t> cur, next;
    cur.assign(1, 0);
    std::size_t off = 0, sz = 1;
    for (int lvl = 0; lvl < f.depth(); ++lvl) {
        const bool deeper = lvl + 1 < f.depth();
        if (deeper) next.resize(sz * p);
        for (std::size_t i = 0; i < sz; ++i) {
            const std::size_t img = cur[i];
            visit(lvl, off, i, img);
            if (deeper) {
                const unsigned shift = f[off + i];
                for (unsigned d = 0; d < p; ++d) {
                    unsigned e = d + shift;
                    if (e >= p) e -= p;
                    next[i * p + d] = img * p + e;
                }
            }
        }
        off += sz;
        sz *= p;
        if (deeper) cur.swap(next);
    }
}

}  // namespace detail

/// The rooted automorphism a^k at depth n.
inline Portrait rooted_a(Prime p, int depth, unsigned k = 1) {
    if (depth < 1) throw std::invalid_argument("rooted_a needs depth >= 1");
    Portrait f(p, depth);
    f[0] = static_cast<Label>(k % p.value());
    return f;
}

/// fg: labels satisfy e_fg(u) = e_f(u) + e_g(u^f) mod p.
inline Portrait compose(const Portrait& f, const Portrait& g) {
    detail::require_compatible(f, g);
    const unsigned p = f.p();
    Portrait out(f.prime(), f.depth());
    detail::for_each_image(f, [&](int, std::size_t off, std::size_t i, std::size_t img) {
        unsigned s = f[off + i] + g[off + img];
        out[off + i] = static_cast<Label>(s >= p ? s - p : s);
    });
    return out;
}

template <class... Rest>
Portrait compose(const Portrait& f, const Portrait& g, const Rest&... rest) {
    if constexpr (sizeof...(rest) == 0)
        return compose(f, g);
    else
        return compose(compose(f, g), rest...);
}

inline Portrait inverse(const Portrait& f) {
    const unsigned p = f.p();
    Portrait out(f.prime(), f.depth());
    detail::for_each_image(f, [&](int, std::size_t off, std::size_t i, std::size_t img) {
        out[off + img] = static_cast<Label>((p - f[off + i]) % p);
    });
    return out;
}

inline Portrait power(const Portrait& f, long long e) {
    Portrait base = e < 0 ? inverse(f) : f;
    unsigned long long n = e < 0 ? static_cast<unsigned long long>(-e) : static_cast<unsigned long long>(e);
    Portrait acc(f.prime(), f.depth());
    while (n) {
        if (n & 1) acc = compose(acc, base);
        n >>= 1;
        if (n) base = compose(base, base);
    }
    return acc;
}

/// [f,g] = f^-1 g^-1 f g.
inline Portrait commutator(const Portrait& f, const Portrait& g) {
    return compose(inverse(f), inverse(g), f, g);
}

/// f^g = g^-1 f g.
inline Portrait conjugate(const Portrait& f, const Portrait& g) { return compose(inverse(g), f, g); }

inline Vertex apply_vertex(const Portrait& f, const Vertex& u) {
    if (u.level() > f.depth()) throw std::out_of_range("vertex level exceeds portrait depth");
    u.validate(f.p());
    const unsigned p = f.p();
    std::vector<unsigned> out;
    out.reserve(static_cast<std::size_t>(u.level()));
    std::size_t orig = 0;
    for (int k = 0; k < u.level(); ++k) {
        const Label lab = f[tree::level_offset(p, k) + orig];
        const unsigned d = u[static_cast<std::size_t>(k)] - 1;
        out.push_back((d + lab) % p + 1);
        orig = orig * p + d;
    }
    return Vertex(std::move(out));
}

/// The section f_u, a portrait of depth n - |u|.
inline Portrait section(const Portrait& f, const Vertex& u) {
    if (u.level() > f.depth()) throw std::out_of_range("vertex level exceeds portrait depth");
    u.validate(f.p());
    const unsigned p = f.p();
    const int d = f.depth() - u.level();
    Portrait out(f.prime(), d);
    std::size_t base = u.local_index(p);
    std::size_t dst = 0, width = 1;
    for (int k = 0; k < d; ++k) {
        const std::size_t src = tree::level_offset(p, u.level() + k) + base * width;
        std::copy_n(f.labels().begin() + static_cast<std::ptrdiff_t>(src), width, out.labels().begin() + static_cast<std::ptrdiff_t>(dst));
        dst += width;
        width *= p;
    }
    return out;
}

/// Inverse of psi extended by a root label: section(result, i) = sections[i-1].
inline Portrait assemble(unsigned root_label, std::span<const Portrait> sections) {
    if (sections.empty()) throw std::invalid_argument("assemble needs p sections");
    const unsigned p = sections[0].p();
    if (sections.size() != p) throw std::invalid_argument("assemble needs exactly p sections");
    const int d = sections[0].depth();
    for (const auto& s : sections)
        if (s.p() != p || s.depth() != d) throw std::invalid_argument("assemble: mismatched section depths");
    Portrait out(Prime(p), d + 1);
    out[0] = static_cast<Label>(root_label % p);
    std::size_t width = 1;
    for (int k = 0; k < d; ++k) {
        const std::size_t src = tree::level_offset(p, k);
        const std::size_t dst = tree::level_offset(p, k + 1);
        for (unsigned c = 0; c < p; ++c)
            std::copy_n(sections[c].labels().begin() + static_cast<std::ptrdiff_t>(src), width,
                        out.labels().begin() + static_cast<std::ptrdiff_t>(dst + c * width));
        width *= p;
    }
    return out;
}

inline Portrait assemble(unsigned root_label, std::initializer_list<Portrait> sections) {
    std::vector<Portrait> v(sections);
    return assemble(root_label, std::span<const Portrait>(v));
}

/// The element of St(|u|) at depth |u| + depth(f) whose section at u is f and
/// whose sections at all other level-|u| vertices are trivial.
inline Portrait embed_at(const Portrait& f, const Vertex& u) {
    u.validate(f.p());
    const unsigned p = f.p();
    const int m = u.level();
    Portrait out(f.prime(), m + f.depth());
    const std::size_t base = u.local_index(p);
    std::size_t src = 0, width = 1;
    for (int k = 0; k < f.depth(); ++k) {
        const std::size_t dst = tree::level_offset(p, m + k) + base * width;
        std::copy_n(f.labels().begin() + static_cast<std::ptrdiff_t>(src), width, out.labels().begin() + static_cast<std::ptrdiff_t>(dst));
        src += width;
        width *= p;
    }
    return out;
}

/// Labels at the level-m vertices, in lexicographic order.
inline std::vector<Label> level_labels(const Portrait& f, int m) {
    if (m < 0 || m >= f.depth()) throw std::out_of_range("level_labels: level outside portrait");
    const std::size_t off = tree::level_offset(f.p(), m);
    const std::size_t sz = tree::level_size(f.p(), m);
    return {f.labels().begin() + static_cast<std::ptrdiff_t>(off), f.labels().begin() + static_cast<std::ptrdiff_t>(off + sz)};
}

/// True iff f fixes every vertex of level m.
inline bool in_stab(const Portrait& f, int m) {
    if (m > f.depth()) throw std::out_of_range("in_stab: level exceeds depth");
    const std::size_t end = tree::level_offset(f.p(), m);
    for (std::size_t i = 0; i < end; ++i)
        if (f[i] != 0) return false;
    return true;
}

/// Image in the depth-n quotient (n <= depth).
inline Portrait truncate(const Portrait& f, int n) {
    if (n > f.depth() || n < 0) throw std::out_of_range("truncate: bad depth");
    Portrait out(f.prime(), n);
    std::copy_n(f.labels().begin(), out.size(), out.labels().begin());
    return out;
}

}  // namespace treegrp
