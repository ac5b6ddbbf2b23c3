//
// Project circscale - Copyright 2026 circscale authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "circscale/lbfgs.hpp"

#include <cmath>
#include <utility>

#include "circscale/error.hpp"

namespace circscale {

CompactLBFGS::CompactLBFGS(Index n, int memory,
                           std::shared_ptr<const ScalingOp> scaling)
    : n_(n), memory_(memory), scaling_(std::move(scaling)), s_(n, 0),
      y_(n, 0), pinv_s_(n, 0) {
  if (n_ < 1 || memory_ < 1)
    throw ConfigError("lbfgs: need n >= 1 and memory >= 1");
  if (scaling_ && scaling_->size() != n_)
    throw ConfigError("lbfgs: scaling size differs from problem size");
}

Vec CompactLBFGS::apply_pinv(const Vec &v) const {
  return scaling_ ? scaling_->apply_Pinv(v) : v;
}

Vec CompactLBFGS::apply_p(const Vec &v) const {
  return scaling_ ? scaling_->apply_P(v) : v;
}

bool CompactLBFGS::update(const Vec &s, const Vec &y) {
  if (s.size() != n_ || y.size() != n_)
    throw ConfigError("lbfgs update: dimension mismatch");

  const double sy = s.dot(y);
  if (!(sy > kCurvatureEps * s.norm() * y.norm()))
    return false;

  const Vec pinv_s = apply_pinv(s);
  const double ypy = y.dot(apply_p(y));

  Index k = s_.cols();
  if (k == memory_) {
    s_.leftCols(k - 1) = s_.rightCols(k - 1).eval();
    y_.leftCols(k - 1) = y_.rightCols(k - 1).eval();
    pinv_s_.leftCols(k - 1) = pinv_s_.rightCols(k - 1).eval();
    --k;
  } else {
    s_.conservativeResize(Eigen::NoChange, k + 1);
    y_.conservativeResize(Eigen::NoChange, k + 1);
    pinv_s_.conservativeResize(Eigen::NoChange, k + 1);
  }
  s_.col(k) = s;
  y_.col(k) = y;
  pinv_s_.col(k) = pinv_s;

  theta_ = fixed_theta_ ? *fixed_theta_ : ypy / sy;
  sty_ = s_.transpose() * y_;
  stpinvs_ = s_.transpose() * pinv_s_;
  refactor();
  return true;
}

void CompactLBFGS::fix_theta(double theta) {
  if (!(theta > 0))
    throw ConfigError("lbfgs: theta must be positive");
  fixed_theta_ = theta;
  theta_ = theta;
  if (s_.cols() > 0)
    refactor();
}

void CompactLBFGS::refactor() {
  const Index k = s_.cols();
  middle_inv_.setZero(2 * k, 2 * k);
  for (Index i = 0; i < k; ++i) {
    middle_inv_(i, i) = -sty_(i, i);
    for (Index j = 0; j < i; ++j) {
      // L(i, j) = s_i^T y_j below the diagonal, L^T in the upper-right block.
      middle_inv_(k + i, j) = sty_(i, j);
      middle_inv_(j, k + i) = sty_(i, j);
    }
  }
  middle_inv_.bottomRightCorner(k, k) = theta_ * stpinvs_;
  // Symmetric diagonal equilibration before factoring.
  middle_scale_ = middle_inv_.diagonal().cwiseAbs().cwiseSqrt().cwiseInverse();
  middle_lu_.compute(middle_scale_.asDiagonal() * middle_inv_ *
                     middle_scale_.asDiagonal());
}

Mat CompactLBFGS::W() const {
  const Index k = s_.cols();
  Mat w(n_, 2 * k);
  w.leftCols(k) = y_;
  w.rightCols(k) = theta_ * pinv_s_;
  return w;
}

Vec CompactLBFGS::apply_middle(const Vec &v) const {
  if (!middle_lu_.isInvertible())
    throw OperatorStateError("lbfgs: singular middle matrix");
  return middle_scale_.cwiseProduct(
      middle_lu_.solve(middle_scale_.cwiseProduct(v)));
}

Vec CompactLBFGS::apply_b0(const Vec &v) const {
  return theta_ * apply_pinv(v);
}

Vec CompactLBFGS::apply(const Vec &v) const {
  if (v.size() != n_)
    throw ConfigError("lbfgs apply: dimension mismatch");

  Vec out = apply_b0(v);
  const Index k = s_.cols();
  if (k == 0)
    return out;

  Vec wtv(2 * k);
  wtv.head(k) = y_.transpose() * v;
  wtv.tail(k) = theta_ * (pinv_s_.transpose() * v);
  const Vec mw = apply_middle(wtv);
  out -= y_ * mw.head(k) + theta_ * (pinv_s_ * mw.tail(k));
  return out;
}

SmwResult smw_subspace_solve(const CompactLBFGS &op, const Vec &g,
                             const FaceMask &mask, const CGConfig &fallback) {
  if (op.scaled())
    throw ConfigError("smw_subspace_solve: requires a diagonal B0");
  if (g.size() != op.size() || mask.size() != op.size())
    throw ConfigError("smw_subspace_solve: dimension mismatch");
  if (mask.num_free() == 0)
    throw ConfigError("smw_subspace_solve: empty face");

  SmwResult res;
  const double theta = op.theta();
  const Vec gf = mask.gather(g);
  const Index k = op.pairs();
  if (k == 0) {
    res.step = mask.scatter(-gf / theta);
    return res;
  }

  const Mat w = op.W();
  Mat wf(mask.num_free(), 2 * k);
  for (Index r = 0; r < mask.num_free(); ++r)
    wf.row(r) = w.row(mask.free_indices()[r]);

  const Mat inner = op.middle_inverse() - (wf.transpose() * wf) / theta;
  Vec scale = inner.diagonal().cwiseAbs();
  if ((scale.array() > 0).all())
    scale = scale.cwiseSqrt().cwiseInverse();
  else
    scale.setOnes();
  Eigen::FullPivLU<Mat> lu(scale.asDiagonal() * inner * scale.asDiagonal());
  if (!lu.isInvertible()) {
    CompactLBFGSOp bop(op);
    auto cg = cg_face(bop, g, mask, nullptr, fallback);
    res.step = std::move(cg.step);
    res.fell_back = true;
    res.cg_iterations = cg.iterations;
    return res;
  }

  const Vec z = scale.cwiseProduct(lu.solve(scale.cwiseProduct(wf.transpose() * gf)));
  const Vec sol = gf / theta + wf * z / (theta * theta);
  res.step = mask.scatter(-sol);
  return res;
}

}  // namespace circscale
