#pragma once

// Dense linear algebra over the prime field F_p: vectors, square matrices and
// subspaces kept in reduced row-echelon form.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace treegrp {

using FpVec = std::vector<std::uint8_t>;

namespace fp {

inline unsigned inv(unsigned x, unsigned p) {
    x %= p;
    if (x == 0) throw std::domain_error("inverse of zero in F_p");
    unsigned r = 1, b = x, e = p - 2;
    while (e) {
        if (e & 1) r = r * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return r;
}

// y += c*x
inline void axpy(FpVec& y, const FpVec& x, unsigned c, unsigned p) {
    if (c % p == 0) return;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = static_cast<std::uint8_t>((y[i] + c * x[i]) % p);
}

inline void scale(FpVec& y, unsigned c, unsigned p) {
    for (auto& v : y) v = static_cast<std::uint8_t>(v * c % p);
}

inline bool is_zero(const FpVec& v) {
    return std::all_of(v.begin(), v.end(), [](std::uint8_t x) { return x == 0; });
}

inline std::string digits(const FpVec& v) {
    std::string s;
    for (auto x : v) s.push_back(x < 10 ? static_cast<char>('0' + x) : static_cast<char>('a' + x - 10));
    return s;
}

}  // namespace fp

class FpMatrix {
public:
    FpMatrix() = default;
    FpMatrix(unsigned p, std::size_t n) : p_(p), n_(n), a_(n * n, 0) {}

    static FpMatrix identity(unsigned p, std::size_t n) {
        FpMatrix m(p, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    unsigned p() const { return p_; }
    std::size_t dim() const { return n_; }
    std::uint8_t& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    std::uint8_t operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

    friend FpMatrix operator*(const FpMatrix& x, const FpMatrix& y) {
        if (x.n_ != y.n_ || x.p_ != y.p_) throw std::invalid_argument("matrix shape mismatch");
        FpMatrix z(x.p_, x.n_);
        const std::size_t n = x.n_;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) {
                const unsigned c = x(i, k);
                if (!c) continue;
                for (std::size_t j = 0; j < n; ++j)
                    z.a_[i * n + j] = static_cast<std::uint8_t>((z.a_[i * n + j] + c * y(k, j)) % x.p_);
            }
        return z;
    }

    /// Row vector times matrix.
    FpVec apply(const FpVec& v) const {
        if (v.size() != n_) throw std::invalid_argument("vector length mismatch");
        FpVec out(n_, 0);
        for (std::size_t i = 0; i < n_; ++i) {
            const unsigned c = v[i];
            if (!c) continue;
            for (std::size_t j = 0; j < n_; ++j) out[j] = static_cast<std::uint8_t>((out[j] + c * (*this)(i, j)) % p_);
        }
        return out;
    }

    FpMatrix inverse() const {
        const std::size_t n = n_;
        FpMatrix a = *this, r = identity(p_, n);
        for (std::size_t col = 0; col < n; ++col) {
            std::size_t piv = col;
            while (piv < n && a(piv, col) == 0) ++piv;
            if (piv == n) throw std::domain_error("singular matrix over F_p");
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a(col, j), a(piv, j));
                std::swap(r(col, j), r(piv, j));
            }
            const unsigned s = fp::inv(a(col, col), p_);
            for (std::size_t j = 0; j < n; ++j) {
                a(col, j) = static_cast<std::uint8_t>(a(col, j) * s % p_);
                r(col, j) = static_cast<std::uint8_t>(r(col, j) * s % p_);
            }
            for (std::size_t i = 0; i < n; ++i) {
                if (i == col || a(i, col) == 0) continue;
                const unsigned c = p_ - a(i, col);
                for (std::size_t j = 0; j < n; ++j) {
                    a(i, j) = static_cast<std::uint8_t>((a(i, j) + c * a(col, j)) % p_);
                    r(i, j) = static_cast<std::uint8_t>((r(i, j) + c * r(col, j)) % p_);
                }
            }
        }
        return r;
    }

    FpMatrix pow(long long e) const {
        FpMatrix base = e < 0 ? inverse() : *this;
        unsigned long long k = e < 0 ? static_cast<unsigned long long>(-e) : static_cast<unsigned long long>(e);
        FpMatrix acc = identity(p_, n_);
        while (k) {
            if (k & 1) acc = acc * base;
            k >>= 1;
            if (k) base = base * base;
        }
        return acc;
    }

    friend bool operator==(const FpMatrix&, const FpMatrix&) = default;

private:
    unsigned p_ = 2;
    std::size_t n_ = 0;
    std::vector<std::uint8_t> a_;
};

/// Subspace of F_p^d with a reduced row-echelon basis (leading entries 1,
/// pivots increasing). The basis is canonical, so equality is basis equality.
class FpSubspace {
public:
    FpSubspace() = default;
    FpSubspace(unsigned p, std::size_t ambient) : p_(p), d_(ambient) {}

    static FpSubspace span(unsigned p, std::size_t ambient, const std::vector<FpVec>& vs) {
        FpSubspace s(p, ambient);
        for (const auto& v : vs) s.insert(v);
        return s;
    }

    static FpSubspace full(unsigned p, std::size_t ambient) {
        FpSubspace s(p, ambient);
        for (std::size_t i = 0; i < ambient; ++i) {
            FpVec e(ambient, 0);
            e[i] = 1;
            s.insert(e);
        }
        return s;
    }

    unsigned p() const { return p_; }
    std::size_t ambient() const { return d_; }
    std::size_t dim() const { return rows_.size(); }
    const std::vector<FpVec>& basis() const { return rows_; }
    const std::vector<std::size_t>& pivots() const { return piv_; }

    /// Residue of v after eliminating against the basis (zero iff v is in the span).
    FpVec reduce(FpVec v) const {
        check(v);
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            const unsigned c = v[piv_[r]];
            if (c) fp::axpy(v, rows_[r], p_ - c, p_);
        }
        return v;
    }

    bool contains(const FpVec& v) const { return fp::is_zero(reduce(v)); }

    /// Adds v to the span; returns true if the dimension grew.
    bool insert(const FpVec& v) {
        FpVec w = reduce(v);
        std::size_t lead = 0;
        while (lead < d_ && w[lead] == 0) ++lead;
        if (lead == d_) return false;
        fp::scale(w, fp::inv(w[lead], p_), p_);
        for (auto& row : rows_) {
            const unsigned c = row[lead];
            if (c) fp::axpy(row, w, p_ - c, p_);
        }
        auto pos = std::lower_bound(piv_.begin(), piv_.end(), lead) - piv_.begin();
        piv_.insert(piv_.begin() + pos, lead);
        rows_.insert(rows_.begin() + pos, std::move(w));
        return true;
    }

    bool contains(const FpSubspace& other) const {
        return std::all_of(other.rows_.begin(), other.rows_.end(), [&](const FpVec& v) { return contains(v); });
    }

    FpSubspace operator+(const FpSubspace& other) const {
        FpSubspace s = *this;
        for (const auto& v : other.rows_) s.insert(v);
        return s;
    }

    FpSubspace intersect(const FpSubspace& other) const {
        // Zassenhaus: echelonize [u | u] and [w | 0]; rows with zero left half give the intersection.
        const std::size_t d = d_;
        FpSubspace big(p_, 2 * d);
        for (const auto& u : rows_) {
            FpVec x(2 * d);
            std::copy(u.begin(), u.end(), x.begin());
            std::copy(u.begin(), u.end(), x.begin() + static_cast<std::ptrdiff_t>(d));
            big.insert(x);
        }
        for (const auto& w : other.rows_) {
            FpVec x(2 * d, 0);
            std::copy(w.begin(), w.end(), x.begin());
            big.insert(x);
        }
        FpSubspace out(p_, d);
        for (std::size_t r = 0; r < big.rows_.size(); ++r)
            if (big.piv_[r] >= d) out.insert(FpVec(big.rows_[r].begin() + static_cast<std::ptrdiff_t>(d), big.rows_[r].end()));
        return out;
    }

    /// Canonical key (the concatenated echelon rows).
    std::string key() const {
        std::string s;
        for (const auto& r : rows_) s += fp::digits(r) + "|";
        return s;
    }

    friend bool operator==(const FpSubspace& a, const FpSubspace& b) {
        return a.p_ == b.p_ && a.d_ == b.d_ && a.rows_ == b.rows_;
    }

private:
    void check(const FpVec& v) const {
        if (v.size() != d_)
            throw std::invalid_argument("vector of length " + std::to_string(v.size()) + " in F_p^" + std::to_string(d_));
    }

    unsigned p_ = 2;
    std::size_t d_ = 0;
    std::vector<FpVec> rows_;
    std::vector<std::size_t> piv_;
};

/// Rank of a list of vectors.
inline std::size_t rank(unsigned p, const std::vector<FpVec>& vs) {
    if (vs.empty()) return 0;
    return FpSubspace::span(p, vs.front().size(), vs).dim();
}

}  // namespace treegrp
