//
// Project circscale - Copyright 2026 circscale authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <memory>

#include "circscale/circulant.hpp"
#include "circscale/ops.hpp"

namespace circscale {

/**
 * @brief Block-circulant scaling pair C = F* T^{1/2} F and P = C C^T.
 *
 * The per-coordinate spectral diagonal t (length n_b * s, indexed k * s + c
 * for frequency k and within-block coordinate c) is strictly positive and
 * symmetric under k -> n_b - k, so every power F* diag(t^e) F is a real
 * symmetric positive definite operator. P approximates the inverse Hessian.
 *
 * Instances are immutable and may be shared between threads.
 */
class ScalingOp {
public:
  ScalingOp(Index n_b, Index s, Vec t);

  // Exact identity; applications return their input unchanged.
  static ScalingOp identity(Index n_b, Index s);

  Index n_b() const { return n_b_; }
  Index s() const { return s_; }
  Index size() const { return n_b_ * s_; }
  const Vec &spectral_diagonal() const { return t_; }
  bool is_identity() const { return identity_; }

  Vec apply_P(const Vec &x) const;
  Vec apply_Pinv(const Vec &x) const;
  Vec apply_C(const Vec &x) const;
  Vec apply_Cinv(const Vec &x) const;

  // Factories for the LinOp views used by the solvers.
  static LinOpPtr P_op(std::shared_ptr<const ScalingOp> s);
  static LinOpPtr Pinv_op(std::shared_ptr<const ScalingOp> s);
  static LinOpPtr C_op(std::shared_ptr<const ScalingOp> s);
  static LinOpPtr Cinv_op(std::shared_ptr<const ScalingOp> s);

private:
  ScalingOp(Index n_b, Index s);

  Vec apply_spectral(const Vec &x, const Vec &multiplier) const;

  Index n_b_, s_;
  Vec t_, t_inv_, t_sqrt_, t_inv_sqrt_;
  bool identity_ = false;
};

/**
 * @brief Builds the scaling from a symmetric positive definite
 * block-circulant Hessian approximation H.
 *
 * Uses t = 1 / Re diag(F H F*), visiting one spectral block at a time, then
 * averages each pair of conjugate frequencies. Throws DegenerateScalingError
 * when an entry of the spectral diagonal is below 1e-12 times its maximum.
 */
ScalingOp build_scaling(const BlockCirculantOp &h);

/// <x, P^{-1} z>.
double scaled_inner(const ScalingOp &s, const Vec &x, const Vec &z);

}  // namespace circscale
