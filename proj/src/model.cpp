//
// Project circscale - Copyright 2026 circscale authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "circscale/model.hpp"

#include <cmath>
#include <utility>

#include "circscale/error.hpp"

namespace circscale {
namespace {
  void check_shapes(const LinOpPtr &a, const Vec &b, const LinOpPtr &k) {
    if (!a || !k)
      throw ConfigError("model: operators must be set");
    if (b.size() != a->rows())
      throw ConfigError("model: data length must equal rows of A");
    if (k->cols() != a->cols())
      throw ConfigError("model: A and K must act on the same space");
  }

  const BlockCirculantOp &as_bc(const LinOpPtr &op, const char *name) {
    const auto *bc = dynamic_cast<const BlockCirculantOp *>(op.get());
    if (bc == nullptr)
      throw ConfigError(std::string("hessian_approx_bc: ") + name
                        + " is not block-circulant");
    return *bc;
  }
}  // namespace

LinOpPtr Objective::hessian(const Vec &x) const {
  return std::make_shared<FunctionOp>(
      size(), [this, x](const Vec &v) { return hess_vec(x, v); });
}

QuadraticModel::QuadraticModel(LinOpPtr a, Vec b, LinOpPtr k, double lambda)
    : a_(std::move(a)), b_(std::move(b)), k_(std::move(k)), lambda_(lambda) {
  check_shapes(a_, b_, k_);
  if (lambda_ < 0)
    throw ConfigError("quadratic model: lambda must be nonnegative");
}

double QuadraticModel::value(const Vec &x) const {
  const Vec r = a_->apply(x) - b_;
  const Vec q = k_->apply(x);
  return 0.5 * r.squaredNorm() + 0.5 * lambda_ * q.squaredNorm();
}

Vec QuadraticModel::gradient(const Vec &x) const {
  Vec g;
  value_gradient(x, g);
  return g;
}

double QuadraticModel::value_gradient(const Vec &x, Vec &g) const {
  const Vec r = a_->apply(x) - b_;
  const Vec q = k_->apply(x);
  g = a_->apply_adjoint(r) + lambda_ * k_->apply_adjoint(q);
  return 0.5 * r.squaredNorm() + 0.5 * lambda_ * q.squaredNorm();
}

Vec QuadraticModel::hess_vec(const Vec &, const Vec &v) const {
  return a_->apply_adjoint(a_->apply(v))
         + lambda_ * k_->apply_adjoint(k_->apply(v));
}

ReconModel::ReconModel(LinOpPtr a, Vec b, Vec weights, LinOpPtr k,
                       double lambda, double delta)
    : a_(std::move(a)), b_(std::move(b)), w_(std::move(weights)),
      k_(std::move(k)), lambda_(lambda), delta_(delta) {
  check_shapes(a_, b_, k_);
  if (w_.size() != b_.size() || !(w_.array() > 0).all())
    throw ConfigError("recon model: weights must be positive, one per datum");
  if (lambda_ < 0 || !(delta_ > 0))
    throw ConfigError("recon model: need lambda >= 0 and delta > 0");
}

ReconModel::ReconModel(LinOpPtr a, Vec b, LinOpPtr k, double lambda,
                       double delta)
    : ReconModel(a, b, (-b.array()).exp().matrix(), k, lambda, delta) { }

double ReconModel::value(const Vec &x) const {
  const Vec r = a_->apply(x) - b_;
  const Vec q = k_->apply(x);
  const double penalty = (delta_ * delta_ + q.array().square()).sqrt().sum();
  return 0.5 * r.dot(w_.cwiseProduct(r)) + lambda_ * penalty;
}

Vec ReconModel::gradient(const Vec &x) const {
  Vec g;
  value_gradient(x, g);
  return g;
}

double ReconModel::value_gradient(const Vec &x, Vec &g) const {
  const Vec r = a_->apply(x) - b_;
  const Vec q = k_->apply(x);
  const Eigen::ArrayXd root = (delta_ * delta_ + q.array().square()).sqrt();
  const Vec wr = w_.cwiseProduct(r);
  const Vec psi = (q.array() / root).matrix();
  g = a_->apply_adjoint(wr) + lambda_ * k_->apply_adjoint(psi);
  return 0.5 * r.dot(wr) + lambda_ * root.sum();
}

Vec ReconModel::curvature_weights(const Vec &kx) const {
  const double d2 = delta_ * delta_;
  return (d2 / (d2 + kx.array().square()).pow(1.5)).matrix();
}

Vec ReconModel::hess_vec(const Vec &x, const Vec &v) const {
  const Vec nk = curvature_weights(k_->apply(x));
  return a_->apply_adjoint(w_.cwiseProduct(a_->apply(v)))
         + lambda_ * k_->apply_adjoint(nk.cwiseProduct(k_->apply(v)));
}

Vec average_weight_block(const Vec &weights, Index n_b, Index s) {
  if (weights.size() != n_b * s)
    throw ConfigError("average_weight_block: length must equal n_b * s");
  return Eigen::Map<const Mat>(weights.data(), s, n_b).rowwise().mean();
}

BlockCirculantOp hessian_approx_bc(const QuadraticModel &m) {
  const auto &a = as_bc(m.A(), "A");
  const auto &k = as_bc(m.K(), "K");
  if (a.n_b() != k.n_b() || a.s_in() != k.s_in())
    throw ConfigError("hessian_approx_bc: A and K block structures differ");
  return bc_sum(1.0, bc_product(a.transpose(), a), m.lambda(),
                bc_product(k.transpose(), k));
}

BlockCirculantOp hessian_approx_bc(const ReconModel &m) {
  const auto &a = as_bc(m.A(), "A");
  const auto &k = as_bc(m.K(), "K");
  if (a.n_b() != k.n_b() || a.s_in() != k.s_in())
    throw ConfigError("hessian_approx_bc: A and K block structures differ");

  const Vec dhat = average_weight_block(m.weights(), a.n_b(), a.s_out());
  const auto data = bc_product(a.transpose(), bc_scale_rows(a, dhat));
  const auto reg = bc_product(k.transpose(), k);
  return bc_sum(1.0, data, m.lambda() / m.delta(), reg);
}

BlockCirculantOp hessian_approx_bc(const Objective &m) {
  if (const auto *q = dynamic_cast<const QuadraticModel *>(&m))
    return hessian_approx_bc(*q);
  if (const auto *r = dynamic_cast<const ReconModel *>(&m))
    return hessian_approx_bc(*r);
  throw ConfigError("hessian_approx_bc: unsupported objective type");
}

}  // namespace circscale
