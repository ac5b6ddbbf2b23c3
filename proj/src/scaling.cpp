//
// Project circscale - Copyright 2026 circscale authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "circscale/scaling.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "circscale/error.hpp"
#include "circscale/fft.hpp"

namespace circscale {
namespace {
  constexpr double kImagTol = 1e-8;
  constexpr double kFloor = 1e-12;

  enum class Power { P, Pinv, C, Cinv };

  class ScalingView final: public LinOp {
  public:
    ScalingView(std::shared_ptr<const ScalingOp> s, Power p)
        : s_(std::move(s)), p_(p) { }

    Index rows() const override { return s_->size(); }
    Index cols() const override { return s_->size(); }

    Vec apply(const Vec &x) const override {
      switch (p_) {
      case Power::P:
        return s_->apply_P(x);
      case Power::Pinv:
        return s_->apply_Pinv(x);
      case Power::C:
        return s_->apply_C(x);
      case Power::Cinv:
        return s_->apply_Cinv(x);
      }
      return x;
    }

    // Every power is symmetric.
    Vec apply_adjoint(const Vec &y) const override { return apply(y); }

  private:
    std::shared_ptr<const ScalingOp> s_;
    Power p_;
  };
}  // namespace

ScalingOp::ScalingOp(Index n_b, Index s): n_b_(n_b), s_(s) { }

ScalingOp::ScalingOp(Index n_b, Index s, Vec t)
    : n_b_(n_b), s_(s), t_(std::move(t)) {
  if (n_b_ < 1 || s_ < 1 || t_.size() != n_b_ * s_)
    throw ConfigError("scaling: spectral diagonal must have n_b * s entries");
  if (!(t_.array() > 0).all() || !t_.allFinite())
    throw DegenerateScalingError("scaling: spectral diagonal must be positive");

  t_inv_ = t_.cwiseInverse();
  t_sqrt_ = t_.cwiseSqrt();
  t_inv_sqrt_ = t_sqrt_.cwiseInverse();
}

ScalingOp ScalingOp::identity(Index n_b, Index s) {
  ScalingOp op(n_b, s);
  op.t_ = Vec::Ones(n_b * s);
  op.t_inv_ = op.t_sqrt_ = op.t_inv_sqrt_ = op.t_;
  op.identity_ = true;
  return op;
}

Vec ScalingOp::apply_spectral(const Vec &x, const Vec &multiplier) const {
  if (x.size() != size())
    throw ConfigError("scaling apply: dimension mismatch");
  if (identity_)
    return x;

  CVec xh = blockwise_dft(x, n_b_, s_);
  xh.array() *= multiplier.array();
  CVec y = blockwise_idft(xh, n_b_, s_);

  const double residue = y.imag().cwiseAbs().maxCoeff();
  if (residue > kImagTol * x.norm())
    throw InternalConsistencyError(
        "scaling apply: imaginary residue " + std::to_string(residue)
        + " exceeds bound; spectral diagonal is not conjugate-symmetric");
  return y.real();
}

Vec ScalingOp::apply_P(const Vec &x) const {
  return apply_spectral(x, t_);
}

Vec ScalingOp::apply_Pinv(const Vec &x) const {
  return apply_spectral(x, t_inv_);
}

Vec ScalingOp::apply_C(const Vec &x) const {
  return apply_spectral(x, t_sqrt_);
}

Vec ScalingOp::apply_Cinv(const Vec &x) const {
  return apply_spectral(x, t_inv_sqrt_);
}

LinOpPtr ScalingOp::P_op(std::shared_ptr<const ScalingOp> s) {
  return std::make_shared<ScalingView>(std::move(s), Power::P);
}

LinOpPtr ScalingOp::Pinv_op(std::shared_ptr<const ScalingOp> s) {
  return std::make_shared<ScalingView>(std::move(s), Power::Pinv);
}

LinOpPtr ScalingOp::C_op(std::shared_ptr<const ScalingOp> s) {
  return std::make_shared<ScalingView>(std::move(s), Power::C);
}

LinOpPtr ScalingOp::Cinv_op(std::shared_ptr<const ScalingOp> s) {
  return std::make_shared<ScalingView>(std::move(s), Power::Cinv);
}

ScalingOp build_scaling(const BlockCirculantOp &h) {
  if (h.s_in() != h.s_out())
    throw ConfigError("build_scaling: Hessian approximation must be square");

  const Index n = h.n_b(), s = h.s_in();
  Vec diag(n * s);
  for_each_spectral_block(h, [&](Index k, const Eigen::MatrixXcd &blk) {
    diag.segment(k * s, s) = blk.diagonal().real();
  });

  const double top = diag.maxCoeff();
  if (!(top > 0) || !diag.allFinite())
    throw DegenerateScalingError("build_scaling: spectral diagonal not positive");
  for (Index i = 0; i < diag.size(); ++i) {
    if (diag[i] <= kFloor * top)
      throw DegenerateScalingError(
          "build_scaling: spectral diagonal entry " + std::to_string(i)
          + " below floor (" + std::to_string(diag[i]) + ")");
  }

  Vec t = diag.cwiseInverse();
  for (Index k = 1; k < n; ++k) {
    const Index pair = n - k;
    if (pair <= k)
      break;
    for (Index c = 0; c < s; ++c) {
      const double avg = 0.5 * (t[k * s + c] + t[pair * s + c]);
      t[k * s + c] = t[pair * s + c] = avg;
    }
  }
  return ScalingOp(n, s, std::move(t));
}

double scaled_inner(const ScalingOp &s, const Vec &x, const Vec &z) {
  if (x.size() != z.size())
    throw ConfigError("scaled_inner: length mismatch");
  return x.dot(s.apply_Pinv(z));
}

}  // namespace circscale
