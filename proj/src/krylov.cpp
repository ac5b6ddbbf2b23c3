//
// Project circscale - Copyright 2026 circscale authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "circscale/krylov.hpp"

#include <cmath>

#include "circscale/error.hpp"

namespace circscale {
namespace {
  // Largest tau >= 0 with |o + p + tau d|^2 = radius^2, where the fixed part
  // of the offset contributes the constant fixed_sq.
  double to_boundary(const Vec &o_plus_p, const Vec &d, double fixed_sq,
                     double radius) {
    const double a = d.squaredNorm();
    const double b = o_plus_p.dot(d);
    const double c = o_plus_p.squaredNorm() + fixed_sq - radius * radius;
    if (a <= 0)
      return 0.0;
    const double disc = std::max(b * b - a * c, 0.0);
    // Stable root of a tau^2 + 2 b tau + c = 0 with c <= 0.
    if (b > 0)
      return std::max(-c / (b + std::sqrt(disc)), 0.0);
    return std::max((-b + std::sqrt(disc)) / a, 0.0);
  }
}  // namespace

std::string_view to_string(CGStatus s) {
  switch (s) {
  case CGStatus::Converged:
    return "converged";
  case CGStatus::MaxIter:
    return "maxiter";
  case CGStatus::BoundaryHit:
    return "boundary";
  case CGStatus::NegativeCurvature:
    return "negative-curvature";
  case CGStatus::NumericalFailure:
    return "numerical-failure";
  }
  return "unknown";
}

CGOutcome cg_face(const LinOp &b, const Vec &g, const FaceMask &mask,
                  const LinOp *precond, const CGConfig &cfg,
                  const Vec *origin) {
  const Index n = mask.size();
  if (b.rows() != n || b.cols() != n || g.size() != n)
    throw ConfigError("cg_face: operator, gradient and mask sizes differ");
  if (precond != nullptr && (precond->rows() != n || precond->cols() != n))
    throw ConfigError("cg_face: preconditioner size mismatch");
  if (!(cfg.rtol > 0 && cfg.rtol < 1))
    throw ConfigError("cg_face: rtol must lie in (0, 1)");
  if (origin != nullptr && origin->size() != n)
    throw ConfigError("cg_face: origin size mismatch");

  CGOutcome out;
  const Index nf = mask.num_free();
  const Index maxiter = cfg.maxiter > 0 ? cfg.maxiter : std::max<Index>(nf, 1);

  Vec o = Vec::Zero(nf);
  double fixed_sq = 0.0;
  if (origin != nullptr) {
    o = mask.gather(*origin);
    fixed_sq = std::max(origin->squaredNorm() - o.squaredNorm(), 0.0);
  }

  auto apply_b = [&](const Vec &v) { return mask.gather(b.apply(mask.scatter(v))); };
  auto apply_m = [&](const Vec &r) -> Vec {
    if (precond == nullptr)
      return r;
    return mask.gather(precond->apply(mask.scatter(r)));
  };

  Vec p = Vec::Zero(nf);
  Vec r = -mask.gather(g);
  const double gnorm = r.norm();
  const double stop = cfg.rtol * gnorm;

  auto finish = [&](CGStatus st) {
    out.step = mask.scatter(p);
    out.status = st;
    return out;
  };

  if (nf == 0 || gnorm == 0.0)
    return finish(CGStatus::Converged);

  Vec z = apply_m(r);
  Vec d = z;
  double rz = r.dot(z);

  for (Index it = 1; it <= maxiter; ++it) {
    out.iterations = it;
    const Vec bd = apply_b(d);
    const double curv = d.dot(bd);
    if (!std::isfinite(curv) || !std::isfinite(rz))
      return finish(CGStatus::NumericalFailure);

    if (curv <= 0) {
      if (cfg.radius)
        p += to_boundary(o + p, d, fixed_sq, *cfg.radius) * d;
      return finish(CGStatus::NegativeCurvature);
    }

    const double alpha = rz / curv;
    if (cfg.radius) {
      const Vec trial = o + p + alpha * d;
      if (trial.squaredNorm() + fixed_sq > *cfg.radius * *cfg.radius) {
        p += to_boundary(o + p, d, fixed_sq, *cfg.radius) * d;
        return finish(CGStatus::BoundaryHit);
      }
    }

    p += alpha * d;
    r -= alpha * bd;
    if (!r.allFinite())
      return finish(CGStatus::NumericalFailure);
    if (r.norm() <= stop)
      return finish(CGStatus::Converged);

    z = apply_m(r);
    const double rz_next = r.dot(z);
    d = z + (rz_next / rz) * d;
    rz = rz_next;
  }
  return finish(CGStatus::MaxIter);
}

}  // namespace circscale
