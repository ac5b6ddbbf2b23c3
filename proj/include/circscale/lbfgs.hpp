//
// Project circscale - Copyright 2026 circscale authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <memory>
#include <optional>

#include <Eigen/LU>

#include "circscale/krylov.hpp"
#include "circscale/ops.hpp"
#include "circscale/scaling.hpp"

namespace circscale {

/**
 * @brief Limited-memory BFGS matrix in compact form
 *
 *   B = theta P^{-1} - W M W^T,   W = [Y, theta P^{-1} S],
 *   M^{-1} = [[-D, L^T], [L, theta S^T P^{-1} S]],
 *
 * with theta = y^T P y / y^T s from the newest pair. Without a scaling
 * P = I and this is the classical representation with B0 = theta I.
 * P^{-1} S and S^T P^{-1} S are cached, so an update costs one product with
 * P^{-1} and one with P.
 *
 * Updates need exclusive access; apply() is read-only.
 */
class CompactLBFGS {
public:
  explicit CompactLBFGS(Index n, int memory = 5,
                        std::shared_ptr<const ScalingOp> scaling = nullptr);

  /// Returns false and leaves the operator unchanged when s^T y is not
  /// sufficiently positive.
  bool update(const Vec &s, const Vec &y);

  Vec apply(const Vec &v) const;

  /// Keeps theta at the given value instead of y^T P y / s^T y.
  void fix_theta(double theta);

  Index size() const { return n_; }
  int memory() const { return memory_; }
  int pairs() const { return static_cast<int>(s_.cols()); }
  double theta() const { return theta_; }
  bool scaled() const { return scaling_ != nullptr; }

  const Mat &S() const { return s_; }
  const Mat &Y() const { return y_; }
  /// W = [Y, theta P^{-1} S].
  Mat W() const;
  /// The 2k x 2k matrix M^{-1}.
  const Mat &middle_inverse() const { return middle_inv_; }
  /// Products with M, via the cached factorization of M^{-1}.
  Vec apply_middle(const Vec &v) const;

  /// theta P^{-1} v.
  Vec apply_b0(const Vec &v) const;

  static constexpr double kCurvatureEps = 1e-10;

private:
  Vec apply_pinv(const Vec &v) const;
  Vec apply_p(const Vec &v) const;
  void refactor();

  Index n_;
  int memory_;
  std::shared_ptr<const ScalingOp> scaling_;
  Mat s_, y_, pinv_s_;
  Mat sty_, stpinvs_;
  Mat middle_inv_;
  Vec middle_scale_;
  Eigen::FullPivLU<Mat> middle_lu_;
  double theta_ = 1.0;
  std::optional<double> fixed_theta_;
};

/// Read-only LinOp view of a CompactLBFGS; the operator must outlive it.
class CompactLBFGSOp final: public LinOp {
public:
  explicit CompactLBFGSOp(const CompactLBFGS &b): b_(&b) { }

  Index rows() const override { return b_->size(); }
  Index cols() const override { return b_->size(); }
  Vec apply(const Vec &v) const override { return b_->apply(v); }
  Vec apply_adjoint(const Vec &v) const override { return b_->apply(v); }

private:
  const CompactLBFGS *b_;
};

struct SmwResult {
  Vec step;  // full length, zero on fixed coordinates
  bool fell_back = false;
  Index cg_iterations = 0;
};

/**
 * @brief Solves B_FF p = -g_F through the Sherman-Morrison-Woodbury identity
 *
 *   B_FF^{-1} = theta^{-1} I
 *             + theta^{-2} W_F (M^{-1} - theta^{-1} W_F^T W_F)^{-1} W_F^T.
 *
 * Requires an unscaled operator (B0 = theta I). If the inner 2k x 2k matrix
 * is singular the solve falls back to cg_face with the given config.
 */
SmwResult smw_subspace_solve(const CompactLBFGS &op, const Vec &g,
                             const FaceMask &mask,
                             const CGConfig &fallback = {});

}  // namespace circscale
