//
// Project circscale - Copyright 2026 circscale authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <gtest/gtest.h>

#include <limits>

#include "circscale/error.hpp"
#include "circscale/krylov.hpp"
#include "test_support.hpp"

namespace circscale {
namespace {

using testing::Rng;

Mat principal(const Mat &m, const FaceMask &f) {
  const auto &idx = f.free_indices();
  Mat sub(idx.size(), idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < idx.size(); ++j)
      sub(i, j) = m(idx[i], idx[j]);
  return sub;
}

FaceMask random_face(Rng &rng, Index n, Index n_free) {
  std::vector<std::uint8_t> free(n, 0);
  Index placed = 0;
  while (placed < n_free) {
    Index i = rng.integer(0, n - 1);
    if (!free[i]) {
      free[i] = 1;
      ++placed;
    }
  }
  return FaceMask(free);
}

TEST(Krylov, PerfectPreconditionerConvergesInOneStep) {
  DiagonalOp b((Vec(2) << 2, 3).finished());
  DiagonalOp inv((Vec(2) << 0.5, 1.0 / 3).finished());
  Vec g(2);
  g << -2, -3;
  CGOutcome out = cg_face(b, g, FaceMask::all_free(2), &inv, {});
  EXPECT_EQ(out.iterations, 1);
  EXPECT_EQ(out.status, CGStatus::Converged);
  EXPECT_LT((out.step - Vec::Ones(2)).norm(), 1e-15);
}

TEST(Krylov, IdentityTakesOneStep) {
  Rng rng(50);
  IdentityOp b(6);
  Vec g = rng.vec(6);
  FaceMask f = FaceMask::fixing(6, {1, 4});
  CGOutcome out = cg_face(b, g, f, nullptr, {});
  EXPECT_EQ(out.iterations, 1);
  EXPECT_LT((out.step + f.mask(g)).norm(), 1e-14);
  EXPECT_EQ(out.step[1], 0.0);
}

TEST(Krylov, MatchesDenseFaceSolve) {
  Rng rng(51);
  for (int t = 0; t < 10; ++t) {
    Mat m = rng.spd(30, 200.0);
    DenseOp b(m);
    FaceMask f = random_face(rng, 30, 17);
    Vec g = rng.vec(30);
    CGConfig cfg;
    cfg.rtol = 1e-12;
    cfg.maxiter = 200;
    CGOutcome out = cg_face(b, g, f, nullptr, cfg);
    Vec ref = principal(m, f).ldlt().solve(-f.gather(g));
    EXPECT_LT((f.gather(out.step) - ref).norm(), 1e-8 * ref.norm());
    EXPECT_EQ(out.status, CGStatus::Converged);
    // Residual criterion on the face.
    Vec r = f.gather(m * out.step + g);
    EXPECT_LE(r.norm(), cfg.rtol * f.gather(g).norm());
  }
}

TEST(Krylov, PreconditionedAndPlainAgree) {
  Rng rng(52);
  Mat m = rng.spd(25, 1e3);
  Mat p = rng.spd(25, 10.0);
  DenseOp b(m), pre(p);
  FaceMask f = random_face(rng, 25, 15);
  Vec g = rng.vec(25);
  CGConfig cfg;
  cfg.rtol = 1e-6;
  cfg.maxiter = 500;
  CGOutcome a = cg_face(b, g, f, nullptr, cfg);
  CGOutcome c = cg_face(b, g, f, &pre, cfg);
  EXPECT_LT((a.step - c.step).norm(), 10 * cfg.rtol * 1e3 * a.step.norm());
}

TEST(Krylov, ExactInversePreconditioner) {
  Rng rng(53);
  Mat m = rng.spd(12, 1e4);
  DenseOp b(m), inv(Mat(m.inverse()));
  Vec g = rng.vec(12);
  CGConfig cfg;
  cfg.rtol = 1e-8;
  CGOutcome out = cg_face(b, g, FaceMask::all_free(12), &inv, cfg);
  EXPECT_EQ(out.iterations, 1);
}

TEST(Krylov, ModelDecreasesMonotonically) {
  Rng rng(54);
  Mat m = rng.spd(40, 1e3);
  DenseOp b(m);
  Vec g = rng.vec(40);
  double prev = 0;
  for (Index k = 1; k <= 15; ++k) {
    CGConfig cfg;
    cfg.rtol = 1e-14;
    cfg.maxiter = k;
    Vec p = cg_face(b, g, FaceMask::all_free(40), nullptr, cfg).step;
    const double q = 0.5 * p.dot(m * p) + g.dot(p);
    EXPECT_LE(q, prev + 1e-12);
    prev = q;
  }
}

TEST(Krylov, TrustRegionBoundary) {
  Rng rng(55);
  Mat m = rng.spd(10, 50.0);
  DenseOp b(m);
  Vec g = 10 * rng.vec(10);
  CGConfig cfg;
  cfg.radius = 0.1;
  CGOutcome out = cg_face(b, g, FaceMask::all_free(10), nullptr, cfg);
  EXPECT_EQ(out.status, CGStatus::BoundaryHit);
  EXPECT_NEAR(out.step.norm(), 0.1, 1e-12);

  // With an offset origin the constraint is on origin + step.
  Vec origin = Vec::Zero(10);
  origin[0] = 0.06;
  out = cg_face(b, g, FaceMask::all_free(10), nullptr, cfg, &origin);
  EXPECT_NEAR((origin + out.step).norm(), 0.1, 1e-12);
}

TEST(Krylov, NegativeCurvatureExits) {
  DiagonalOp b((Vec(2) << -1, 1).finished());
  Vec g(2);
  g << 1, 0;
  CGConfig cfg;
  cfg.radius = 2.0;
  CGOutcome out = cg_face(b, g, FaceMask::all_free(2), nullptr, cfg);
  EXPECT_EQ(out.status, CGStatus::NegativeCurvature);
  EXPECT_NEAR(out.step.norm(), 2.0, 1e-14);
  EXPECT_LT(out.step[0], 0.0);
}

TEST(Krylov, NonFiniteProductsAreReported) {
  FunctionOp b(2, [](const Vec &v) {
    return Vec(v * std::numeric_limits<double>::quiet_NaN());
  });
  CGOutcome out = cg_face(b, Vec::Ones(2), FaceMask::all_free(2), nullptr, {});
  EXPECT_EQ(out.status, CGStatus::NumericalFailure);
}

TEST(Krylov, MaxIterAndValidation) {
  Rng rng(56);
  Mat m = rng.spd(20, 1e4);
  DenseOp b(m);
  CGConfig cfg;
  cfg.rtol = 1e-12;
  cfg.maxiter = 3;
  CGOutcome out = cg_face(b, rng.vec(20), FaceMask::all_free(20), nullptr, cfg);
  EXPECT_EQ(out.status, CGStatus::MaxIter);
  EXPECT_EQ(out.iterations, 3);
  cfg.rtol = 1.5;
  EXPECT_THROW(cg_face(b, rng.vec(20), FaceMask::all_free(20), nullptr, cfg),
               ConfigError);
  EXPECT_EQ(to_string(CGStatus::BoundaryHit), "boundary");
}

}  // namespace
}  // namespace circscale
