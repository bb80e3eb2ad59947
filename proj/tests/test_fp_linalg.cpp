#include <gtest/gtest.h>

#include <random>

#include <treegrp/fp_linalg.hpp>

using namespace treegrp;

namespace {

FpVec random_vec(unsigned p, std::size_t n, std::mt19937& rng) {
    FpVec v(n);
    for (auto& x : v) x = static_cast<std::uint8_t>(rng() % p);
    return v;
}

}  // namespace

TEST(Fp, Inverse) {
    for (unsigned p : {2u, 3u, 5u, 7u, 251u})
        for (unsigned x = 1; x < p; ++x) EXPECT_EQ(x * fp::inv(x, p) % p, 1u);
}

TEST(FpMatrix, InverseAndPow) {
    std::mt19937 rng(3);
    const unsigned p = 5;
    FpMatrix A(p, 4);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) A(i, j) = static_cast<std::uint8_t>(i <= j ? (i == j ? 1 + rng() % 4 : rng() % 5) : 0);
    EXPECT_EQ(A * A.inverse(), FpMatrix::identity(p, 4));
    EXPECT_EQ(A.pow(3), A * A * A);
    EXPECT_EQ(A.pow(0), FpMatrix::identity(p, 4));
    FpMatrix Z(p, 2);
    EXPECT_THROW(Z.inverse(), std::domain_error);
}

TEST(FpMatrix, ApplyIsRowAction) {
    const unsigned p = 3;
    FpMatrix A(p, 3);
    A(0, 1) = A(1, 2) = A(2, 0) = 1;  // e_i -> e_{i+1}
    EXPECT_EQ(A.apply(FpVec{1, 0, 0}), (FpVec{0, 1, 0}));
    FpMatrix B = A * A;
    EXPECT_EQ(B.apply(FpVec{1, 0, 0}), A.apply(A.apply(FpVec{1, 0, 0})));
}

TEST(FpSubspace, EchelonIsCanonical) {
    const unsigned p = 3;
    auto S = FpSubspace::span(p, 3, {{1, 2, 0}, {0, 1, 2}});
    auto T = FpSubspace::span(p, 3, {{1, 0, 2}, {2, 1, 0}});
    EXPECT_EQ(S, T);
    EXPECT_EQ(S.key(), T.key());
    EXPECT_EQ(S.dim(), 2u);
    EXPECT_TRUE(S.contains(FpVec{1, 1, 1}));
    EXPECT_FALSE(S.contains(FpVec{1, 0, 0}));
}

TEST(FpSubspace, SumAndIntersection) {
    std::mt19937 rng(4);
    for (unsigned p : {2u, 3u, 5u})
        for (int t = 0; t < 20; ++t) {
            std::vector<FpVec> a, b;
            for (int i = 0; i < 3; ++i) a.push_back(random_vec(p, 6, rng));
            for (int i = 0; i < 3; ++i) b.push_back(random_vec(p, 6, rng));
            const auto A = FpSubspace::span(p, 6, a), B = FpSubspace::span(p, 6, b);
            const auto S = A + B, I = A.intersect(B);
            EXPECT_EQ(S.dim() + I.dim(), A.dim() + B.dim());
            EXPECT_TRUE(A.contains(I) && B.contains(I));
            EXPECT_TRUE(S.contains(A) && S.contains(B));
        }
}

TEST(FpSubspace, Rank) {
    EXPECT_EQ(rank(3, {{1, 0}, {2, 0}}), 1u);
    EXPECT_EQ(rank(3, {{1, 0}, {0, 1}}), 2u);
    EXPECT_EQ(rank(5, {}), 0u);
    EXPECT_EQ(FpSubspace::full(5, 4).dim(), 4u);
}
