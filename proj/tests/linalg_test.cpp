#include <gtest/gtest.h>

#include "test_util.hpp"
#include "wiretap/errors.hpp"
#include "wiretap/linalg.hpp"

using namespace wiretap;
using wiretap::testing::gram_rank;
using wiretap::testing::random_matrix;

namespace {

void expect_valid_gsvd(const CMatrix& h, const CMatrix& g, const GsvdResult& res) {
  const double hs = std::max(h.norm(), 1.0), gs = std::max(g.norm(), 1.0);
  EXPECT_LE(frobenius_relative_residual(h * res.psi1, res.x * res.d1.transpose(), hs), 1e-8);
  EXPECT_LE(frobenius_relative_residual(g * res.psi2, res.x * res.d2.transpose(), gs), 1e-8);
  Eigen::MatrixXd cs = res.d1.transpose() * res.d1 + res.d2.transpose() * res.d2;
  EXPECT_LE((cs - Eigen::MatrixXd::Identity(res.k, res.k)).norm(), 1e-8);
  EXPECT_LE((res.psi1.adjoint() * res.psi1 - CMatrix::Identity(h.cols(), h.cols())).norm(), 1e-8);
  EXPECT_LE((res.psi2.adjoint() * res.psi2 - CMatrix::Identity(g.cols(), g.cols())).norm(), 1e-8);
  EXPECT_EQ(numeric_rank(res.x), res.k);
  // Block layout of d1 and d2.
  for (int i = 0; i < res.r; ++i) EXPECT_NEAR(res.d1(i, i), 1.0, 1e-10);
  for (int i = 0; i < res.s; ++i) {
    EXPECT_GT(res.s1_diag(i), 0.0);
    EXPECT_GT(res.s2_diag(i), 0.0);
    EXPECT_NEAR(res.d1(res.r + i, res.r + i), res.s1_diag(i), 1e-12);
    if (i > 0) EXPECT_GE(res.s1_diag(i - 1), res.s1_diag(i) - 1e-12);
  }
  const int m = static_cast<int>(h.cols()), k = static_cast<int>(g.cols());
  for (int i = 0; i < res.p; ++i)
    EXPECT_NEAR(res.d2(k - res.p + i, res.r + res.s + i), 1.0, 1e-10);
  (void)m;
}

}  // namespace

TEST(NumericRank, ThresholdRule) {
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 1e-15;
  EXPECT_EQ(numeric_rank(d, 1e-9), 1);
  EXPECT_EQ(numeric_rank(CMatrix::Zero(3, 4)), 0);
  EXPECT_EQ(numeric_rank(CMatrix(0, 3)), 0);
  std::mt19937_64 rng(7);
  EXPECT_EQ(numeric_rank(random_matrix(rng, 3, 5)), 3);
}

TEST(NullSpace, Examples) {
  CMatrix z = null_space_basis(CMatrix::Zero(2, 3));
  EXPECT_EQ(z.cols(), 3);
  EXPECT_LE((z.adjoint() * z - CMatrix::Identity(3, 3)).norm(), 1e-12);
  EXPECT_EQ(null_space_basis(CMatrix::Identity(3, 3)).cols(), 0);
  EXPECT_EQ(null_space_basis(CMatrix::Identity(3, 3)).rows(), 3);
  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    CMatrix a = random_matrix(rng, 2, 3);
    CMatrix n = null_space_basis(a);
    ASSERT_EQ(n.cols(), 1);
    EXPECT_LT((a * n).norm(), 1e-10);
    EXPECT_NEAR(n.col(0).norm(), 1.0, 1e-12);
  }
}

TEST(SpanTests, ContainmentAndIntersection) {
  std::mt19937_64 rng(3);
  CMatrix b = random_matrix(rng, 4, 2);
  EXPECT_TRUE(span_contained(b * random_matrix(rng, 2, 3), b));
  EXPECT_FALSE(span_contained(random_matrix(rng, 4, 2), random_matrix(rng, 4, 1)));
  EXPECT_TRUE(span_intersection_trivial(random_matrix(rng, 4, 2), random_matrix(rng, 4, 2)));
  EXPECT_FALSE(span_intersection_trivial(random_matrix(rng, 4, 3), random_matrix(rng, 4, 2)));
  EXPECT_TRUE(span_contained(CMatrix(4, 0), b));
}

TEST(SpanTests, InvariantUnderInvertibleRightFactor) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    const int n = 2 + t % 4, c = 1 + t % 3;
    CMatrix a = random_matrix(rng, n, c);
    CMatrix inv = random_matrix(rng, c, c);
    CMatrix ab = a * inv;
    EXPECT_TRUE(span_contained(a, ab));
    EXPECT_TRUE(span_contained(ab, a));
    EXPECT_EQ(numeric_rank(ab), numeric_rank(a));
  }
}

TEST(SubspaceDimsOracle, Examples) {
  CMatrix i2 = CMatrix::Identity(2, 2);
  EXPECT_EQ(subspace_dims_oracle(i2, i2), (SubspaceDims{2, 0, 0, 2}));
  std::mt19937_64 rng(9);
  EXPECT_EQ(subspace_dims_oracle(random_matrix(rng, 4, 2), random_matrix(rng, 4, 3)),
            (SubspaceDims{4, 2, 1, 1}));
  CMatrix h = random_matrix(rng, 4, 3);
  EXPECT_EQ(subspace_dims_oracle(h, h * random_matrix(rng, 3, 2)), (SubspaceDims{3, 0, 1, 2}));
}

TEST(Gsvd, IdentityPair) {
  CMatrix i2 = CMatrix::Identity(2, 2);
  GsvdResult r = gsvd_transform(i2, i2);
  EXPECT_EQ((SubspaceDims{r.k, r.p, r.r, r.s}), (SubspaceDims{2, 0, 0, 2}));
  expect_valid_gsvd(i2, i2, r);
}

TEST(Gsvd, GenericShapes) {
  std::mt19937_64 rng(21);
  CMatrix h = random_matrix(rng, 4, 2), g = random_matrix(rng, 4, 3);
  GsvdResult r = gsvd_transform(h, g);
  EXPECT_EQ((SubspaceDims{r.k, r.p, r.r, r.s}), (SubspaceDims{4, 2, 1, 1}));
  expect_valid_gsvd(h, g, r);

  CMatrix h3 = random_matrix(rng, 3, 3), g3 = random_matrix(rng, 3, 1);
  GsvdResult r3 = gsvd_transform(h3, g3);
  EXPECT_EQ((SubspaceDims{r3.k, r3.p, r3.r, r3.s}), (SubspaceDims{3, 0, 2, 1}));
  expect_valid_gsvd(h3, g3, r3);
}

TEST(Gsvd, SharedBlockColumnsMapToSameDirections) {
  std::mt19937_64 rng(33);
  for (int t = 0; t < 30; ++t) {
    CMatrix h = random_matrix(rng, 4, 3), g = random_matrix(rng, 4, 3);
    GsvdResult r = gsvd_transform(h, g);
    ASSERT_GT(r.s, 0);
    for (int i = 0; i < r.s; ++i) {
      CVector a = h * r.psi1.col(r.psi1_common_offset() + i);
      CVector b = g * r.psi2.col(r.psi2_common_offset() + i);
      // Parallel vectors: rank of [a b] is one.
      CMatrix ab(4, 2);
      ab << a, b;
      EXPECT_EQ(numeric_rank(ab, 1e-8), 1);
    }
  }
}

TEST(Gsvd, RandomTriplesMatchRankOracle) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> dim(1, 6);
  for (int t = 0; t < 200; ++t) {
    const int n = dim(rng), m = dim(rng), k = dim(rng);
    CMatrix h = random_matrix(rng, n, m), g = random_matrix(rng, n, k);
    if (t % 3 == 1) {
      const int rk = std::uniform_int_distribution<int>(1, std::min(n, m))(rng);
      h = random_matrix(rng, n, rk) * random_matrix(rng, rk, m);
    }
    if (t % 5 == 2) g = h * random_matrix(rng, m, k);
    GsvdResult r = gsvd_transform(h, g);
    // Oracle from Gram-matrix ranks, independent of the SVD-based helpers.
    const int kk = gram_rank(hcat(h, g)), rh = gram_rank(h), rg = gram_rank(g);
    EXPECT_EQ(r.k, kk);
    EXPECT_EQ(r.p, kk - rh);
    EXPECT_EQ(r.r, kk - rg);
    EXPECT_EQ(r.s, rh + rg - kk);
    expect_valid_gsvd(h, g, r);
  }
}

TEST(Gsvd, GenericDimensionFormula) {
  std::mt19937_64 rng(77);
  for (int n = 1; n <= 6; ++n)
    for (int m = 1; m <= 6; ++m)
      for (int k = 1; k <= 6; ++k) {
        GsvdResult r = gsvd_transform(random_matrix(rng, n, m), random_matrix(rng, n, k));
        const int kk = std::min(m + k, n);
        EXPECT_EQ(r.k, kk);
        EXPECT_EQ(r.p, kk - std::min(m, n));
        EXPECT_EQ(r.r, kk - std::min(k, n));
        EXPECT_EQ(r.s, std::min(m, n) + std::min(k, n) - kk);
      }
}

TEST(Gsvd, ZeroMatrices) {
  GsvdResult r = gsvd_transform(CMatrix::Zero(3, 2), CMatrix::Zero(3, 2));
  EXPECT_EQ(r.k, 0);
  EXPECT_EQ(r.psi1.rows(), 2);
  EXPECT_EQ(r.psi2.cols(), 2);
  std::mt19937_64 rng(1);
  CMatrix h = random_matrix(rng, 3, 2);
  GsvdResult r2 = gsvd_transform(h, CMatrix::Zero(3, 2));
  EXPECT_EQ((SubspaceDims{r2.k, r2.p, r2.r, r2.s}), (SubspaceDims{2, 0, 2, 0}));
  expect_valid_gsvd(h, CMatrix::Zero(3, 2), r2);
}

TEST(Gsvd, RowMismatchThrows) {
  EXPECT_THROW(gsvd_transform(CMatrix::Zero(3, 2), CMatrix::Zero(2, 2)), InvalidInput);
}

TEST(LogDet, MatchesEigenvalueSum) {
  std::mt19937_64 rng(4);
  CMatrix a = random_matrix(rng, 4, 4);
  CMatrix m = CMatrix::Identity(4, 4) + a * a.adjoint();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
  EXPECT_NEAR(ln_det_hpd(m), es.eigenvalues().array().log().sum(), 1e-10);
  EXPECT_NEAR(log2_det_hpd(m) * std::log(2.0), ln_det_hpd(m), 1e-10);
}
