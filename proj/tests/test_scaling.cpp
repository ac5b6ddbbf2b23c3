//
// Project circscale - Copyright 2026 circscale authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <gtest/gtest.h>

#include "circscale/error.hpp"
#include "circscale/scaling.hpp"
#include "test_support.hpp"

namespace circscale {
namespace {

using testing::Rng;

BlockCirculantOp circulant_2x2() {
  // [[3, 1], [1, 3]] with n_b = 2, s = 1.
  std::vector<SparseBlock> b;
  b.push_back((Mat(1, 1) << 3).finished().sparseView());
  b.push_back((Mat(1, 1) << 1).finished().sparseView());
  return BlockCirculantOp(1, 1, b);
}

TEST(Scaling, TwoByTwoCirculantInvertsExactly) {
  ScalingOp s = build_scaling(circulant_2x2());
  EXPECT_NEAR(s.spectral_diagonal()[0], 0.25, 1e-15);
  EXPECT_NEAR(s.spectral_diagonal()[1], 0.5, 1e-15);
  Mat p = testing::dense_of(s, &ScalingOp::apply_P);
  Mat expect(2, 2);
  expect << 3.0 / 8, -1.0 / 8, -1.0 / 8, 3.0 / 8;
  EXPECT_LT((p - expect).norm(), 1e-15);
}

TEST(Scaling, IdentityHessianGivesIdentityMaps) {
  ScalingOp s = build_scaling(BlockCirculantOp::identity(5, 2));
  Rng rng(20);
  Vec x = rng.vec(10);
  EXPECT_LT((s.apply_P(x) - x).norm(), 1e-14);
  EXPECT_LT((s.apply_C(x) - x).norm(), 1e-14);

  ScalingOp id = ScalingOp::identity(5, 2);
  EXPECT_TRUE(id.is_identity());
  EXPECT_EQ(id.apply_P(x), x);
  EXPECT_EQ(id.apply_Pinv(x), x);
  EXPECT_EQ(id.apply_C(x), x);
  EXPECT_EQ(id.apply_Cinv(x), x);
  EXPECT_DOUBLE_EQ(scaled_inner(id, x, x), x.squaredNorm());
}

TEST(Scaling, PowersCompose) {
  Rng rng(21);
  auto s = testing::random_scaling(rng, 16, 3);
  for (int t = 0; t < 20; ++t) {
    Vec x = rng.vec(48);
    EXPECT_LT((s->apply_Pinv(s->apply_P(x)) - x).norm(), 1e-12 * x.norm());
    EXPECT_LT((s->apply_C(s->apply_C(x)) - s->apply_P(x)).norm(),
              1e-12 * x.norm());
    EXPECT_LT((s->apply_Cinv(s->apply_C(x)) - x).norm(), 1e-12 * x.norm());
  }
}

TEST(Scaling, OperatorsAreSymmetricPositiveDefinite) {
  Rng rng(22);
  auto s = testing::random_scaling(rng, 7, 3);
  for (auto fn: {&ScalingOp::apply_P, &ScalingOp::apply_Pinv,
                 &ScalingOp::apply_C, &ScalingOp::apply_Cinv}) {
    Mat m = testing::dense_of(*s, fn);
    EXPECT_LT((m - m.transpose()).norm(), 1e-12 * m.norm());
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()));
    EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
  }
}

TEST(Scaling, ScaledInnerProduct) {
  Rng rng(23);
  auto s = testing::random_scaling(rng, 6, 2);
  for (int t = 0; t < 100; ++t) {
    Vec x = rng.vec(12), z = rng.vec(12);
    EXPECT_GT(scaled_inner(*s, x, x), 0.0);
    EXPECT_NEAR(scaled_inner(*s, x, z), s->apply_Cinv(x).dot(s->apply_Cinv(z)),
                1e-12 * x.norm() * z.norm() * 100);
    EXPECT_NEAR(scaled_inner(*s, x, z), scaled_inner(*s, z, x), 1e-10);
  }
}

TEST(Scaling, ImprovesConditioning) {
  Rng rng(24);
  for (int t = 0; t < 5; ++t) {
    BlockCirculantOp h = testing::random_spd_bcop(rng, 8, 4, 0.05);
    ScalingOp s = build_scaling(h);
    Mat c = testing::dense_of(s, &ScalingOp::apply_C);
    Mat hd = h.dense();
    EXPECT_LT(testing::cond2(c.transpose() * hd * c), testing::cond2(hd));
  }
}

TEST(Scaling, ScaledHessianHasUnitSpectralDiagonal) {
  Rng rng(25);
  BlockCirculantOp h = testing::random_spd_bcop(rng, 6, 3);
  ScalingOp s = build_scaling(h);
  Mat c = testing::dense_of(s, &ScalingOp::apply_C);
  Eigen::MatrixXcd f = testing::dense_block_dft(6, 3);
  Eigen::MatrixXcd m =
      f * (c.transpose() * h.dense() * c).cast<std::complex<double>>() *
      f.adjoint();
  for (Index i = 0; i < m.rows(); ++i)
    EXPECT_NEAR(m(i, i).real(), 1.0, 1e-10);
}

TEST(Scaling, DegenerateHessianIsRejected) {
  std::vector<SparseBlock> b;
  b.push_back((Mat(1, 1) << 1).finished().sparseView());
  b.push_back((Mat(1, 1) << 1).finished().sparseView());
  // [[1, 1], [1, 1]] has spectral diagonal (2, 0).
  EXPECT_THROW(build_scaling(BlockCirculantOp(1, 1, b)),
               DegenerateScalingError);
  EXPECT_THROW(ScalingOp(2, 1, Vec::Constant(2, -1.0)),
               DegenerateScalingError);
  EXPECT_THROW(ScalingOp(2, 2, Vec::Ones(3)), ConfigError);
}

TEST(Scaling, LinOpViews) {
  Rng rng(26);
  auto s = testing::random_scaling(rng, 4, 2);
  Vec x = rng.vec(8);
  EXPECT_LT((ScalingOp::P_op(s)->apply(x) - s->apply_P(x)).norm(), 1e-15);
  EXPECT_LT((ScalingOp::Pinv_op(s)->apply_adjoint(x) - s->apply_Pinv(x)).norm(),
            1e-15);
  EXPECT_LT((ScalingOp::C_op(s)->apply(x) - s->apply_C(x)).norm(), 1e-15);
  EXPECT_LT((ScalingOp::Cinv_op(s)->apply(x) - s->apply_Cinv(x)).norm(), 1e-15);
}

}  // namespace
}  // namespace circscale
