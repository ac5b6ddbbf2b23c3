//
// Project circscale - Copyright 2026 circscale authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <memory>

#include "circscale/circulant.hpp"
#include "circscale/ops.hpp"

namespace circscale {

/// Smooth objective on the nonnegative orthant as seen by the solvers.
class Objective {
public:
  virtual ~Objective() = default;

  virtual Index size() const = 0;
  virtual double value(const Vec &x) const = 0;
  virtual Vec gradient(const Vec &x) const = 0;
  virtual Vec hess_vec(const Vec &x, const Vec &v) const = 0;

  virtual double value_gradient(const Vec &x, Vec &g) const {
    g = gradient(x);
    return value(x);
  }

  /// Hessian at x as a symmetric operator; captures a copy of x.
  LinOpPtr hessian(const Vec &x) const;
};

/**
 * @brief f(x) = 1/2 |Ax - b|^2 + 1/2 lambda |Kx|^2.
 */
class QuadraticModel final: public Objective {
public:
  QuadraticModel(LinOpPtr a, Vec b, LinOpPtr k, double lambda);

  Index size() const override { return a_->cols(); }
  double value(const Vec &x) const override;
  Vec gradient(const Vec &x) const override;
  double value_gradient(const Vec &x, Vec &g) const override;
  Vec hess_vec(const Vec &x, const Vec &v) const override;

  const LinOpPtr &A() const { return a_; }
  const LinOpPtr &K() const { return k_; }
  const Vec &b() const { return b_; }
  double lambda() const { return lambda_; }

private:
  LinOpPtr a_;
  Vec b_;
  LinOpPtr k_;
  double lambda_;
};

/**
 * @brief Weighted least squares with an edge-preserving penalty:
 *
 *   f(x) = 1/2 (Ax - b)^T V (Ax - b) + lambda sum_i sqrt(delta^2 + (Kx)_i^2)
 *
 * with V = diag(exp(-b_ref)). The weights come from a reference sinogram,
 * normally the noiseless one.
 */
class ReconModel final: public Objective {
public:
  ReconModel(LinOpPtr a, Vec b, Vec weights, LinOpPtr k, double lambda,
             double delta);
  // Weights exp(-b).
  ReconModel(LinOpPtr a, Vec b, LinOpPtr k, double lambda, double delta);

  Index size() const override { return a_->cols(); }
  double value(const Vec &x) const override;
  Vec gradient(const Vec &x) const override;
  double value_gradient(const Vec &x, Vec &g) const override;
  Vec hess_vec(const Vec &x, const Vec &v) const override;

  const LinOpPtr &A() const { return a_; }
  const LinOpPtr &K() const { return k_; }
  const Vec &b() const { return b_; }
  const Vec &weights() const { return w_; }
  double lambda() const { return lambda_; }
  double delta() const { return delta_; }

  /// Curvature weights n_i = delta^2 / (delta^2 + q_i^2)^{3/2}.
  Vec curvature_weights(const Vec &kx) const;

private:
  LinOpPtr a_;
  Vec b_, w_;
  LinOpPtr k_;
  double lambda_, delta_;
};

/// Averages the per-view diagonal weight blocks: (D_1 + ... + D_nb) / n_b.
Vec average_weight_block(const Vec &weights, Index n_b, Index s);

/**
 * @brief Block-circulant Hessian surrogate used to build the scaling.
 *
 * QuadraticModel: the exact Hessian A^T A + lambda K^T K.
 * ReconModel: A^T Vhat A + lambda K^T N(0) K with Vhat the block-averaged
 * weights and N(0) = I / delta.
 * Throws ConfigError unless A and K are BlockCirculantOp instances.
 */
BlockCirculantOp hessian_approx_bc(const QuadraticModel &m);
BlockCirculantOp hessian_approx_bc(const ReconModel &m);
BlockCirculantOp hessian_approx_bc(const Objective &m);

}  // namespace circscale
